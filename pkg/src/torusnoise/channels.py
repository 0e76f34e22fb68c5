"""Quantum operations in Kraus form and their non-unitality measures.

A channel ``S(rho) = sum_mu M_mu rho M_mu^dagger`` is summarised by

* the operator ``Gamma = S(I/N) - I/N = (1/N) sum_mu [M_mu, M_mu^dagger]``,
  traceless and Hermitian, whose phase-space picture locates contraction;
* the scalar ``eta = N tr[Gamma^2]``, which vanishes exactly for unital maps.

``eta`` is available through three independent routes (commutator sum, purity
growth of the maximally mixed state, affine representation) so they can be
checked against each other.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .torus import DimensionError, TorusSpace, translation

log = logging.getLogger(__name__)

TP_TOL = 1e-10
HERMITIAN_TOL = 1e-10
POSITIVITY_SLACK = 1e-8
SUPEROPERATOR_MAX_N = 64


class TracePreservationError(ValueError):
    """Kraus operators violate ``sum M^dagger M = I``."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving map given by a stack of Kraus operators.

    ``kraus`` has shape ``(K, N, N)``.  ``params`` records how the channel
    was built (used for serialisation and iteration heuristics only).
    """

    space: TorusSpace
    kraus: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        K = np.array(self.kraus, dtype=complex)
        if K.ndim == 2:
            K = K[None]
        N = self.space.N
        if K.ndim != 3 or K.shape[1:] != (N, N):
            raise DimensionError(f"Kraus stack must have shape (K, {N}, {N}), got {K.shape}")
        if K.shape[0] < 1:
            raise ValueError("a channel needs at least one Kraus operator")
        if K.shape[0] > N * N:
            log.warning("Kraus count %d exceeds N^2 = %d (no rank reduction performed)",
                        K.shape[0], N * N)
        K.setflags(write=False)
        object.__setattr__(self, "kraus", K)
        res = check_tp(K)
        if res > TP_TOL:
            raise TracePreservationError(f"TP residual {res:.3g} exceeds {TP_TOL:g}")

    @property
    def N(self) -> int:
        return self.space.N

    def __len__(self):
        return self.kraus.shape[0]

    def __call__(self, rho):
        return apply(self, rho)


def identity_channel(space: TorusSpace) -> KrausChannel:
    return KrausChannel(space, np.eye(space.N, dtype=complex)[None], {"type": "identity"})


def maximally_mixed(N: int) -> np.ndarray:
    return np.eye(N, dtype=complex) / N


def validate_density(rho, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``rho`` as an array after checking it is a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise ValueError(f"density matrix is not Hermitian (deviation {herm:.3g})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr!r}")
    lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
    if lam < -POSITIVITY_SLACK:
        raise ValueError(f"density matrix has negative eigenvalue {lam:.3g}")
    return rho


def apply(ch: KrausChannel, rho) -> np.ndarray:
    """``sum_mu M_mu rho M_mu^dagger`` (Kraus terms summed in list order)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.N, ch.N):
        raise DimensionError(f"state has shape {rho.shape}, channel acts on dimension {ch.N}")
    K = ch.kraus
    return np.einsum("mij,mkj->ik", K @ rho, K.conj(), optimize=True)


def check_tp(ch) -> float:
    """Max-norm residual of ``sum M^dagger M - I``.

    Accepts a channel or a bare Kraus stack, so that non-TP lists can be
    diagnosed before construction.
    """
    K = ch.kraus if isinstance(ch, KrausChannel) else np.asarray(ch, dtype=complex)
    if K.ndim == 2:
        K = K[None]
    S = np.einsum("mji,mjk->ik", K.conj(), K)
    return float(np.max(np.abs(S - np.eye(K.shape[1]))))


def gamma_operator(ch: KrausChannel) -> np.ndarray:
    """Non-unitality operator ``(1/N) sum_mu [M_mu, M_mu^dagger]``."""
    K = ch.kraus
    Kd = K.conj().transpose(0, 2, 1)
    return (K @ Kd - Kd @ K).sum(axis=0) / ch.N


def eta(ch: KrausChannel) -> float:
    G = gamma_operator(ch)
    # tr[G^2] for Hermitian G is the squared Frobenius norm
    return float(ch.N * np.sum(np.abs(G) ** 2))


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho.conj().T, rho)))


def eta_from_purity(ch: KrausChannel) -> float:
    """Relative purity gain of the maximally mixed state after one step."""
    p0 = 1.0 / ch.N
    p1 = purity(apply(ch, maximally_mixed(ch.N)))
    return (p1 - p0) / p0


def is_unital(ch: KrausChannel, tol: float = 1e-10) -> bool:
    rho_I = maximally_mixed(ch.N)
    return bool(np.max(np.abs(apply(ch, rho_I) - rho_I)) < tol)


def superoperator_matrix(ch: KrausChannel) -> np.ndarray:
    """``N^2 x N^2`` matrix acting on column-stacked operators.

    ``vec(X) = X.reshape(-1, order="F")`` and
    ``vec(M X M^dagger) = (conj(M) kron M) vec(X)``.
    """
    N = ch.N
    if N > SUPEROPERATOR_MAX_N:
        raise DimensionError(f"superoperator matrix limited to N <= {SUPEROPERATOR_MAX_N}, got {N}")
    A = ch.kraus.reshape(len(ch), N * N)
    G = (A.conj().T @ A).reshape(N, N, N, N)  # [a, c, b, d] = sum conj(M[a,c]) M[b,d]
    return G.transpose(0, 2, 1, 3).reshape(N * N, N * N)


def vec(X) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, N: int) -> np.ndarray:
    return np.asarray(v).reshape(N, N, order="F")


@dataclass(frozen=True)
class AffineRep:
    """Channel matrix in the orthonormal basis of normalised translations.

    Basis ordering: index ``a*N + b`` holds ``T_(a,b)/sqrt(N)``, so index 0
    is ``I/sqrt(N)``.  ``matrix`` is ``N^2 x N^2``, or ``N^2 x 1`` when only
    the first column was computed (enough for ``v1`` and ``eta``).
    """

    matrix: np.ndarray

    @property
    def full(self) -> bool:
        return self.matrix.shape[1] == self.matrix.shape[0]

    @property
    def corner(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def v1(self) -> np.ndarray:
        return self.matrix[1:, 0]

    @property
    def v2(self) -> np.ndarray:
        self._require_full()
        return self.matrix[0, 1:]

    @property
    def M(self) -> np.ndarray:
        self._require_full()
        return self.matrix[1:, 1:]

    def _require_full(self):
        if not self.full:
            raise ValueError("only the first column of this representation was computed")


def translation_basis(space: TorusSpace) -> np.ndarray:
    """Columns are ``vec(T_(a,b))/sqrt(N)`` in ``a*N + b`` order."""
    N = space.N
    B = np.empty((N * N, N * N), dtype=complex)
    for a in range(N):
        for b in range(N):
            B[:, a * N + b] = vec(translation(space, a, b)) / np.sqrt(N)
    return B


def translation_coefficients(X) -> np.ndarray:
    """``c[..., a, b] = tr[T_(a,b)^dagger X] / sqrt(N)`` for a stack of operators.

    ``T_(a,b)`` is supported on the cyclic diagonal ``(j+a, j)``, so each
    row ``a`` of coefficients is an FFT of one diagonal of ``X``.
    """
    X = np.asarray(X)
    N = X.shape[-1]
    j = np.arange(N)
    rows = (j[None, :] + j[:, None]) % N  # [a, j] -> j + a
    D = X[..., rows, j[None, :]]
    ab = np.outer(j, j)
    return np.fft.fft(D, axis=-1) * np.exp(-1j * np.pi * ab / N) / np.sqrt(N)


def affine_representation(ch: KrausChannel, first_column_only: bool = False) -> AffineRep:
    """``[S]_ij = tr[L_i^dagger S(L_j)]`` with ``L`` the normalised translations."""
    N = ch.N
    if first_column_only:
        col = translation_coefficients(apply(ch, np.eye(N) / np.sqrt(N)))
        return AffineRep(col.reshape(N * N, 1))
    S = superoperator_matrix(ch)
    j = np.arange(N)
    out = np.empty((N * N, N * N), dtype=complex)  # [vec entry, basis index]
    for a in range(N):
        # T_(a,b) has entries w^(ab/2) w^(bj) at (j+a, j); vec index j*N + (j+a)
        cols = j * N + (j + a) % N
        vals = np.exp(1j * np.pi * a * j / N)[None, :] * np.exp(2j * np.pi * np.outer(j, j) / N)
        out[:, a * N: (a + 1) * N] = S[:, cols] @ vals / np.sqrt(N)
    images = out.T.reshape(N * N, N, N).transpose(0, 2, 1)  # unvec each column
    coeffs = translation_coefficients(images).reshape(N * N, N * N)
    return AffineRep(coeffs.T)


def eta_from_affine(rep: AffineRep) -> float:
    v1 = rep.v1
    return float(np.real(np.vdot(v1, v1)))


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """Channel ``outer(inner(rho))`` with Kraus set ``{A_mu B_nu}``."""
    if outer.space != inner.space:
        raise DimensionError(f"cannot compose channels on {outer.space} and {inner.space}")
    A, B = outer.kraus, inner.kraus
    K = (A[:, None] @ B[None, :]).reshape(-1, outer.N, outer.N)
    return KrausChannel(outer.space, K, {"type": "compose",
                                         "outer": outer.params, "inner": inner.params})


def choi_min_eigenvalue(ch: KrausChannel) -> float:
    """Smallest eigenvalue of the Choi matrix (debug aid, ``N <= 32``)."""
    N = ch.N
    if N > 32:
        raise DimensionError("Choi check limited to N <= 32")
    A = ch.kraus.reshape(len(ch), N * N)
    C = A.T @ A.conj()
    return float(np.linalg.eigvalsh((C + C.conj().T) / 2)[0])
