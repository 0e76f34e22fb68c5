"""Noise channels on the torus: diffusive (unital) and dissipative families.

All transition operators ``P_ij = |i><j|`` are momentum-basis matrix units
returned in position form, so noise channels compose directly with the
unitary maps in :mod:`torusnoise.maps`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import (KrausChannel, check_tp, superoperator_matrix, TP_TOL,
                       TracePreservationError)
from .torus import DimensionError, TorusSpace, fourier_matrix, translation


class ParameterQuantizationError(ValueError):
    """A continuous parameter does not land on the Hilbert-space grid."""


def _momentum_units(space: TorusSpace):
    F = fourier_matrix(space)
    return F.conj().T, F


def transition_op(space: TorusSpace, i: int, j: int) -> np.ndarray:
    """``|p_i><p_j|`` in position form."""
    N = space.N
    if not (0 <= i < N and 0 <= j < N):
        raise IndexError(f"transition indices ({i}, {j}) outside 0..{N - 1}")
    Fd, _ = _momentum_units(space)
    return np.outer(Fd[:, i], Fd[:, j].conj())


def momentum_projector(space: TorusSpace, indices) -> np.ndarray:
    Fd, _ = _momentum_units(space)
    cols = Fd[:, list(indices)]
    return cols @ cols.conj().T


def momentum_shift(space: TorusSpace, s: int = 1) -> np.ndarray:
    """Cyclic momentum translation ``|p_n> -> |p_(n+s) mod N>``."""
    Fd, F = _momentum_units(space)
    S = np.roll(np.eye(space.N, dtype=complex), s, axis=0)
    return Fd @ S @ F


# --- simple dissipation channel -------------------------------------------

def sdc_index_map(N: int, alpha: float, signed: bool = False) -> np.ndarray:
    """Target momentum index ``f(i)`` for each source index ``i = 0..N-1``.

    Unsigned (default): ``f(i) = floor(alpha * i)`` over ``i = 0..N-1``.
    Signed: sources are read as ``i - N`` for ``i >= N/2``, mapped by
    ``trunc(alpha * i)`` and reduced mod N, so the contraction acts
    symmetrically towards ``p = 0``.
    """
    i = np.arange(N)
    if signed:
        si = np.where(i >= N // 2, i - N, i)
        t = np.trunc(alpha * si).astype(int)
    else:
        t = np.floor(alpha * i).astype(int)
    return t % N


def _check_sdc(eps, alpha):
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps!r}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")


def sdc_channel(space: TorusSpace, eps: float, alpha: float, signed: bool = False) -> KrausChannel:
    """Simple dissipation channel
    ``D(rho) = (1-eps) rho + eps sum_i P_{f(i) i} rho P_{f(i) i}^dagger``.
    """
    _check_sdc(eps, alpha)
    N = space.N
    f = sdc_index_map(N, alpha, signed)
    Fd, _ = _momentum_units(space)
    ops = []
    if eps < 1.0:
        ops.append(math.sqrt(1.0 - eps) * np.eye(N, dtype=complex))
    if eps > 0.0:
        for i in range(N):
            ops.append(math.sqrt(eps) * np.outer(Fd[:, f[i]], Fd[:, i].conj()))
    return KrausChannel(space, np.array(ops),
                        {"type": "sdc", "eps": eps, "alpha": alpha, "signed": signed})


def sdc_multiplicities(N: int, alpha: float, signed: bool = False) -> np.ndarray:
    return np.bincount(sdc_index_map(N, alpha, signed), minlength=N)


def sdc_eta_exact(space: TorusSpace, eps: float, alpha: float, signed: bool = False) -> float:
    """Discrete-sum value ``(eps^2/N)(sum_t mult(t)^2 - N)``."""
    _check_sdc(eps, alpha)
    N = space.N
    mult = sdc_multiplicities(N, alpha, signed)
    return eps**2 * float(np.sum(mult**2) - N) / N


def sdc_eta_analytic(eps: float, alpha: float) -> float:
    """Continuum estimate ``eps^2 (1 - alpha) / alpha``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    return eps**2 * (1.0 - alpha) / alpha


def sdc_gamma(space: TorusSpace, eps: float, alpha: float, signed: bool = False) -> np.ndarray:
    """Closed form ``(eps/N) sum_i (P_{f(i) f(i)} - P_ii)``.

    Diagonal in momentum with entries ``eps (mult(t) - 1) / N``; negative
    exactly on momenta that no source is mapped to.
    """
    _check_sdc(eps, alpha)
    N = space.N
    diag = eps * (sdc_multiplicities(N, alpha, signed) - 1.0) / N
    Fd, F = _momentum_units(space)
    return (Fd * diag) @ F


# --- sloppy baker noise ----------------------------------------------------

def sloppy_shift(N: int, delta: float) -> int:
    if N % 2:
        raise DimensionError(f"sloppy noise needs even N, got {N}")
    s = N * delta / 2
    if abs(s - round(s)) > 1e-9:
        raise ParameterQuantizationError(
            f"N*delta/2 = {s!r} is not an integer; delta must be a multiple of 2/N = {2 / N!r}")
    return int(round(s))


def sloppy_noise(space: TorusSpace, delta: float) -> KrausChannel:
    """Measure which momentum half the state is in; shift the top half down by ``delta/2``.

    Kraus operators ``{P_bottom, V^(-s) P_top}`` with ``s = N delta / 2``.
    """
    N = space.N
    s = sloppy_shift(N, delta)
    Pb = momentum_projector(space, range(N // 2))
    Pt = momentum_projector(space, range(N // 2, N))
    V = momentum_shift(space, -s)
    return KrausChannel(space, np.array([Pb, V @ Pt]), {"type": "sloppy", "delta": delta})


def sloppy_gamma(space: TorusSpace, delta: float) -> np.ndarray:
    """``(1/N)(V^(-s) P_top V^s - P_top)``."""
    N = space.N
    s = sloppy_shift(N, delta)
    Pt = momentum_projector(space, range(N // 2, N))
    V = momentum_shift(space, -s)
    return (V @ Pt @ V.conj().T - Pt) / N


# --- random unitary processes ----------------------------------------------

RUP_WEIGHT_CUTOFF = 1e-15


def symmetric_displacement(a, N: int):
    a = np.asarray(a) % N
    return np.where(a >= N // 2, a - N, a)


def rup_weights(N: int, sigma: float) -> np.ndarray:
    """Gaussian weights ``c[a, b]`` over translation steps, summing to one."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    d = symmetric_displacement(np.arange(N), N).astype(float)
    g = np.exp(-(d**2) / (2.0 * sigma**2 * N**2))
    c = np.outer(g, g)
    return c / c.sum()


def rup_gaussian(space: TorusSpace, sigma: float) -> KrausChannel:
    """Gaussian mixture of phase-space translations ``sum c_ab T rho T^dagger``.

    Weights below ``RUP_WEIGHT_CUTOFF`` times the largest are dropped and the
    remainder renormalised; the result is still an exact mixture of
    unitaries, hence unital.
    """
    N = space.N
    c = rup_weights(N, sigma)
    keep = np.argwhere(c > RUP_WEIGHT_CUTOFF * c.max())
    w = c[keep[:, 0], keep[:, 1]]
    w = w / w.sum()
    ops = np.array([math.sqrt(wi) * translation(space, int(a), int(b))
                    for wi, (a, b) in zip(w, keep)])
    return KrausChannel(space, ops, {"type": "rup", "sigma": sigma})


def random_unitary_sum(space: TorusSpace, n_terms: int, rng) -> KrausChannel:
    """Random convex mixture of Haar-like unitaries (test fixture)."""
    N = space.N
    w = rng.dirichlet(np.ones(n_terms))
    ops = []
    for wi in w:
        Z = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
        Q, R = np.linalg.qr(Z)
        Q = Q * (np.diag(R) / np.abs(np.diag(R)))
        ops.append(math.sqrt(wi) * Q)
    return KrausChannel(space, np.array(ops), {"type": "random_unitary", "terms": n_terms})


# --- generalised amplitude damping ----------------------------------------

@dataclass
class GadModel:
    """Coefficients ``c[n, k]`` of ``A_k = sum_n c_n^k |n><n+k|``.

    ``periodic`` lets the ladder wrap (``n + k`` taken mod N); otherwise
    terms with ``n + k`` outside ``0..N-1`` are dropped.  ``basis`` chooses
    whether ``|n>`` are momentum (default) or position states.
    """

    N: int
    c: dict = field(default_factory=dict)
    periodic: bool = False
    basis: str = "momentum"

    def __post_init__(self):
        if self.basis not in ("momentum", "position"):
            raise ValueError(f"unknown GAD basis {self.basis!r}")
        self.c = {(int(n), int(k)): complex(v) for (n, k), v in self.c.items()}

    def coeff(self, n: int, k: int) -> complex:
        if self.periodic:
            n %= self.N
        return self.c.get((n, k), 0.0)

    def _target(self, n: int, k: int):
        src = n + k
        if self.periodic:
            return src % self.N
        return src if 0 <= src < self.N else None

    def ladder(self) -> list[int]:
        return sorted({k for (n, k), v in self.c.items() if v != 0})

    def transition_matrix(self, skewness: int = 0) -> np.ndarray:
        """``m[i, l] = c_l^(i-l) conj(c_(l-a)^(i-l))`` for skewness ``a``.

        Rows are source indices ``i``, columns targets ``l``.
        """
        N = self.N
        m = np.zeros((N, N), dtype=complex)
        for i in range(N):
            for l in range(N):
                if self.periodic:
                    k = (i - l) % N
                    m[i, l] = self.coeff(l, k) * np.conj(self.coeff(l - skewness, k))
                else:
                    k = i - l
                    if 0 <= l - skewness < N:
                        m[i, l] = self.coeff(l, k) * np.conj(self.coeff(l - skewness, k))
        return m

    def kraus_matrices(self) -> np.ndarray:
        """Kraus operators in the model's own basis."""
        N = self.N
        by_k = {}
        for (n, k), v in self.c.items():
            if v == 0:
                continue
            tgt = self._target(n, k)
            if not 0 <= n < N or tgt is None:
                continue
            A = by_k.setdefault(k, np.zeros((N, N), dtype=complex))
            A[n, tgt] += v
        if not by_k:
            raise ValueError("GAD model has no non-zero coefficients")
        return np.array([by_k[k] for k in sorted(by_k)])

    @classmethod
    def from_transition_matrix(cls, m0, phases=None, periodic=False, basis="momentum"):
        """Model with ``|c_l^(i-l)|^2 = m0[i, l]`` (rows must sum to one)."""
        m0 = np.asarray(m0, dtype=float)
        N = m0.shape[0]
        c = {}
        for i in range(N):
            for l in range(N):
                if m0[i, l] == 0:
                    continue
                k = (i - l) % N if periodic else i - l
                ph = 1.0 if phases is None else phases[i, l]
                c[(l, k)] = math.sqrt(m0[i, l]) * ph
        return cls(N, c, periodic, basis)


def gad_channel(space: TorusSpace, model: GadModel) -> KrausChannel:
    if model.N != space.N:
        raise DimensionError(f"model dimension {model.N} does not match space {space.N}")
    A = model.kraus_matrices()
    res = check_tp(A)
    if res > TP_TOL:
        raise TracePreservationError(f"GAD model is not trace preserving (residual {res:.3g})")
    if model.basis == "momentum":
        Fd, F = _momentum_units(space)
        A = Fd[None] @ A @ F[None]
    return KrausChannel(space, A, {"type": "gad", "periodic": model.periodic,
                                   "basis": model.basis, "c": gad_coefficients(model)})


def gad_coefficients(model: GadModel) -> list:
    return [[n, k, v.real, v.imag] for (n, k), v in sorted(model.c.items())]


def gad_eta(model: GadModel) -> float:
    """``(1/N) sum_l (sum_i m_il)^2 - 1`` from the skewness-zero matrix.

    The column sums are the populations of ``N S(I/N)``.
    """
    m0 = model.transition_matrix(0).real
    w = m0.sum(axis=0)
    return float(np.sum(w**2) / model.N - 1.0)


def gad_translation_diagonal(space: TorusSpace, model: GadModel, tol: float = 1e-12,
                             check_tol: float = 1e-8):
    """Test whether the channel is an incoherent mixture of basis translations.

    Returns ``(is_diagonal, weights)``.  ``weights[s]`` multiplies
    ``W_s rho W_s^dagger`` where ``W_s |n> = |n + s mod N>`` in the model
    basis.  The decomposition is accepted only when ``m0`` is circulant and
    the re-synthesised mixture reproduces the superoperator (``N <= 16``).
    """
    N = model.N
    m0 = model.transition_matrix(0).real
    idx = np.arange(N)
    for i in range(N):
        # circulant: m0[i, l] depends only on (i - l) mod N
        if np.max(np.abs(m0[i] - m0[0][(idx - i) % N])) > tol:
            return False, None
    weights = {}
    for d in range(N):
        w = m0[d, 0]  # source d -> target 0, displacement -d
        if w > tol:
            weights[(-d) % N] = float(w)
    if N > 16:
        raise DimensionError("translation-diagonal verification limited to N <= 16")
    ops = []
    for s, w in sorted(weights.items()):
        W = np.roll(np.eye(N, dtype=complex), s, axis=0)
        ops.append(math.sqrt(w) * W)
    ops = np.array(ops)
    if model.basis == "momentum":
        Fd, F = _momentum_units(space)
        ops = Fd[None] @ ops @ F[None]
    try:
        mix = KrausChannel(space, ops)
    except TracePreservationError:
        return False, None
    diff = np.max(np.abs(superoperator_matrix(mix) - superoperator_matrix(gad_channel(space, model))))
    if diff > check_tol:
        return False, None
    return True, weights


# --- qubit reference channel -----------------------------------------------

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def amplitude_damping_qubit(gamma: float) -> KrausChannel:
    """Standard one-qubit amplitude damping written with Pauli matrices."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
    I = np.eye(2, dtype=complex)
    r = math.sqrt(1.0 - gamma)
    M0 = ((1 + r) * I + (1 - r) * SIGMA_Z) / 2
    M1 = math.sqrt(gamma) * (SIGMA_X + 1j * SIGMA_Y) / 2
    return KrausChannel(TorusSpace(2), np.array([M0, M1]),
                        {"type": "amplitude_damping", "gamma": gamma})


def qubit_damping_model(gamma: float) -> GadModel:
    """The same channel as a ladder model in the position basis."""
    return GadModel(2, {(0, 0): 1.0, (1, 0): math.sqrt(1.0 - gamma), (0, 1): math.sqrt(gamma)},
                    basis="position")
