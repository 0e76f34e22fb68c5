"""Invariant states of channels and the rate at which they are approached."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import KrausChannel, apply, maximally_mixed, purity, superoperator_matrix, unvec
from .torus import DimensionError

SPECTRAL_MAX_N = 16
DEGENERACY_TOL = 1e-8


class MultiplicityError(RuntimeError):
    """Eigenvalue 1 of the superoperator is degenerate: no unique fixed point."""


@dataclass
class ConvergenceReport:
    iterations: int
    final_residual: float
    converged: bool
    tol: float
    purity_trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def default_max_iter(ch: KrausChannel) -> int:
    """``10 N / eps`` when the channel records its coupling, else ``1000 N``."""
    eps = _find_eps(ch.params)
    if eps:
        return int(math.ceil(10 * ch.N / eps))
    return 1000 * ch.N


def _find_eps(params):
    if not isinstance(params, dict):
        return None
    if params.get("eps"):
        return params["eps"]
    for key in ("outer", "inner"):
        eps = _find_eps(params.get(key))
        if eps:
            return eps
    return None


def invariant_state(ch: KrausChannel, tol: float = 1e-10, max_iter: int | None = None,
                    rho0=None):
    """Iterate ``rho <- S(rho)`` until the Frobenius step is below ``tol``.

    Each iterate is re-Hermitised and trace-renormalised.  Returns
    ``(rho, report)``; failing to converge is reported, not raised.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    max_iter = default_max_iter(ch) if max_iter is None else max_iter
    rho = maximally_mixed(ch.N) if rho0 is None else np.array(rho0, dtype=complex)
    trace = [purity(rho)]
    residual = math.inf
    it = 0
    while it < max_iter:
        new = apply(ch, rho)
        new = (new + new.conj().T) / 2
        new /= np.trace(new).real
        it += 1
        residual = float(np.linalg.norm(new - rho))
        rho = new
        trace.append(purity(rho))
        if residual < tol:
            break
    report = ConvergenceReport(it, residual, residual < tol, tol, trace)
    return rho, report


def invariant_state_spectral(ch: KrausChannel) -> np.ndarray:
    """Fixed point from the eigenvector of the superoperator nearest eigenvalue 1."""
    N = ch.N
    if N > SPECTRAL_MAX_N:
        raise DimensionError(f"spectral fixed point limited to N <= {SPECTRAL_MAX_N}")
    lam, vecs = np.linalg.eig(superoperator_matrix(ch))
    dist = np.abs(lam - 1.0)
    near = np.count_nonzero(dist < DEGENERACY_TOL)
    if near > 1:
        raise MultiplicityError(f"eigenvalue 1 has multiplicity {near}")
    rho = unvec(vecs[:, np.argmin(dist)], N)
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def _traceless(X):
    N = X.shape[0]
    return X - np.trace(X) / N * np.eye(N)


def subleading_modulus(ch: KrausChannel, n_probes: int = 2, power_steps: int = 10,
                       krylov_dim: int | None = None, seed: int = 0) -> float:
    """Second-largest eigenvalue modulus of the channel.

    The channel maps traceless operators to traceless operators and the
    fixed point carries the only eigenvalue-1 mode outside that subspace,
    so iterating on random traceless probes deflates it.  A few plain power
    steps are followed by an Arnoldi pass on the same iterates, which
    resolves the defective eigenvalues that dissipative channels have.
    """
    N = ch.N
    dim = N * N - 1
    m = min(dim, 120) if krylov_dim is None else min(krylov_dim, dim)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(n_probes):
        X = _traceless(rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)))
        X /= np.linalg.norm(X)
        for _ in range(power_steps):
            Y = _traceless(apply(ch, X))
            nrm = np.linalg.norm(Y)
            if nrm == 0.0:
                break
            X = Y / nrm
        else:
            best = max(best, _arnoldi_max_modulus(ch, X, m))
    return min(best, 1.0 + 1e-8)


def _arnoldi_max_modulus(ch, X0, m, breakdown=1e-12):
    V = [X0 / np.linalg.norm(X0)]
    H = np.zeros((m + 1, m), dtype=complex)
    for j in range(m):
        W = _traceless(apply(ch, V[j]))
        for _ in range(2):  # re-orthogonalise
            for i in range(j + 1):
                h = np.vdot(V[i], W)
                H[i, j] += h
                W = W - h * V[i]
        H[j + 1, j] = np.linalg.norm(W)
        if H[j + 1, j].real < breakdown:
            m = j + 1
            break
        V.append(W / H[j + 1, j])
    return float(np.max(np.abs(np.linalg.eigvals(H[:m, :m]))))
