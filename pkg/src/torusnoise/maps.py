"""Unitary quantum maps on the torus and the classical dissipative standard map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel
from .torus import DimensionError, TorusSpace, dft, fourier_matrix

UNITARY_TOL = 1e-10


def quantum_baker(space: TorusSpace) -> np.ndarray:
    """Balazs-Voros baker map ``F_N^dagger blockdiag(F_{N/2}, F_{N/2})``.

    Fourier blocks use the space's Bloch phases; the usual construction
    takes ``theta_q = theta_p = 1/2``.
    """
    N = space.N
    if N % 2:
        raise DimensionError(f"baker map needs even N, got {N}")
    Fh = dft(N // 2, space.theta_q, space.theta_p)
    blocks = np.zeros((N, N), dtype=complex)
    blocks[: N // 2, : N // 2] = Fh
    blocks[N // 2:, N // 2:] = Fh
    return fourier_matrix(space).conj().T @ blocks


def quantum_standard_map(space: TorusSpace, k: float) -> np.ndarray:
    """Kicked-rotor propagator ``U_kin U_kick`` for ``V(q) = -k cos(2 pi q)``."""
    N = space.N
    q = space.positions
    kick = np.exp(2j * np.pi * N * k * np.cos(2 * np.pi * q))
    n = np.arange(N) + space.theta_p
    kin = np.exp(-1j * np.pi * n**2 / N)
    F = fourier_matrix(space)
    return (F.conj().T * kin) @ F * kick[None, :]


def unitary_channel(U, space: TorusSpace | None = None, tol: float = UNITARY_TOL) -> KrausChannel:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DimensionError(f"unitary must be square, got shape {U.shape}")
    dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if dev > tol:
        raise ValueError(f"operator is not unitary (deviation {dev:.3g})")
    space = TorusSpace(U.shape[0]) if space is None else space
    return KrausChannel(space, U[None], {"type": "unitary"})


# --- classical dissipative standard map ------------------------------------

@dataclass(frozen=True)
class ClassicalPoint:
    q: float
    p: float


def _wrap_p(p):
    return (p + 0.5) % 1.0 - 0.5


def _sin2pi(q):
    """``sin(2 pi q)`` with exact zeros at half-integer ``q``."""
    x = np.mod(2.0 * np.asarray(q, dtype=float), 2.0)
    r = np.mod(x, 1.0)
    s = np.sin(np.pi * np.minimum(r, 1.0 - r))
    return np.where(x >= 1.0, -s, s)


def classical_step(pt: ClassicalPoint, k: float, delta: float) -> ClassicalPoint:
    """``p' = delta p - 2 pi k sin(2 pi q)``, then ``q' = q + p'``."""
    q, p = standard_map_arrays(np.float64(pt.q), np.float64(pt.p), k, delta)
    return ClassicalPoint(float(q), float(p))


def standard_map_arrays(q, p, k: float, delta: float):
    """Vectorised :func:`classical_step`; ``q`` in ``[0,1)``, ``p`` in ``[-1/2,1/2)``."""
    p = _wrap_p(delta * p - 2 * np.pi * k * _sin2pi(q))
    q = (q + p) % 1.0
    return q, p


@dataclass
class PhaseHistogram:
    """Visit counts on an ``nq x np`` grid over ``[0,1) x [-1/2,1/2)``."""

    counts: np.ndarray
    seed: int | None = None

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def shape(self):
        return self.counts.shape

    def occupied_fraction(self) -> float:
        return float(np.count_nonzero(self.counts)) / self.counts.size

    def merge(self, other: "PhaseHistogram") -> "PhaseHistogram":
        return PhaseHistogram(self.counts + other.counts, self.seed)


def bin_points(q, p, nq: int, np_: int) -> np.ndarray:
    iq = np.minimum((np.asarray(q) * nq).astype(int), nq - 1)
    ip = np.minimum(((np.asarray(p) + 0.5) * np_).astype(int), np_ - 1)
    return np.bincount(iq * np_ + ip, minlength=nq * np_).reshape(nq, np_)


def classical_attractor(k: float, delta: float, n_traj: int = 1000, n_steps: int = 5000,
                        transient: int = 500, nq: int = 128, np_: int = 128,
                        seed: int = 0) -> PhaseHistogram:
    """Histogram of the steps after ``transient`` for uniformly seeded trajectories."""
    if transient >= n_steps:
        raise ValueError(f"transient ({transient}) must be below n_steps ({n_steps})")
    counts = np.zeros((nq, np_), dtype=np.int64)
    rng = np.random.default_rng(seed)
    q = rng.random(n_traj)
    p = rng.random(n_traj) - 0.5
    for step in range(n_steps):
        q, p = standard_map_arrays(q, p, k, delta)
        if step >= transient and n_traj:
            counts += bin_points(q, p, nq, np_)
    return PhaseHistogram(counts, seed)
