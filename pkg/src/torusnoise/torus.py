"""Finite Hilbert space of the quantized torus.

Operators are plain complex ``(N, N)`` numpy arrays written in the position
basis ``|q_j>``, ``q_j = (j + theta_q) / N``.  Momentum states are the rows of
:func:`fourier_matrix`, so an operator ``A`` given by its momentum-basis matrix
``A_p`` is ``F^dagger A_p F`` in position form (see :func:`from_momentum`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

IMAGE_CUTOFF = 2


class DimensionError(ValueError):
    """Raised for invalid Hilbert dimensions or mismatched operator shapes."""


@dataclass(frozen=True)
class TorusSpace:
    """Torus Hilbert space of dimension ``N = 1/h`` with Bloch phases."""

    N: int
    theta_q: float = 0.0
    theta_p: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise DimensionError(f"torus dimension must be an integer >= 2, got {self.N!r}")
        for name in ("theta_q", "theta_p"):
            th = getattr(self, name)
            if not 0.0 <= th < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {th!r}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def hbar_eff(self) -> float:
        return 1.0 / (2.0 * np.pi * self.N)

    @property
    def positions(self) -> np.ndarray:
        return (np.arange(self.N) + self.theta_q) / self.N

    @property
    def momenta(self) -> np.ndarray:
        return (np.arange(self.N) + self.theta_p) / self.N


@dataclass(frozen=True)
class HusimiGrid:
    """Coherent-state expectation values sampled on a cell-centred grid.

    ``values[j, k]`` belongs to the point ``(qs[j], ps[k])``.
    """

    qs: np.ndarray
    ps: np.ndarray
    values: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def make_space(N: int, theta_q: float = 0.0, theta_p: float = 0.0) -> TorusSpace:
    return TorusSpace(N, theta_q, theta_p)


def fourier_matrix(space: TorusSpace) -> np.ndarray:
    """Unitary position-to-momentum transform.

    ``F[n, m] = exp(-2 pi i (n + theta_p)(m + theta_q) / N) / sqrt(N)``.
    """
    return dft(space.N, space.theta_q, space.theta_p)


def dft(N: int, theta_q: float = 0.0, theta_p: float = 0.0) -> np.ndarray:
    """Shifted DFT matrix for any ``N >= 1`` (used for sub-blocks)."""
    n = np.arange(N) + theta_p
    m = np.arange(N) + theta_q
    return np.exp(-2j * np.pi * np.outer(n, m) / N) / np.sqrt(N)


def from_momentum(space: TorusSpace, A_p: np.ndarray) -> np.ndarray:
    """Position-basis form of an operator given by its momentum-basis matrix."""
    F = fourier_matrix(space)
    return F.conj().T @ A_p @ F


def to_momentum(space: TorusSpace, A: np.ndarray) -> np.ndarray:
    F = fourier_matrix(space)
    return F @ A @ F.conj().T


def shift_operator(N: int) -> np.ndarray:
    """Cyclic shift ``X|j> = |j+1 mod N>``."""
    return np.roll(np.eye(N, dtype=complex), 1, axis=0)


def clock_operator(N: int) -> np.ndarray:
    """Phase operator ``Z|j> = w^j |j>`` with ``w = exp(2 pi i / N)``."""
    return np.diag(np.exp(2j * np.pi * np.arange(N) / N))


def translation(space: TorusSpace, a: int, b: int) -> np.ndarray:
    """Schwinger translation ``T_(a,b) = w^(ab/2) X^a Z^b``.

    ``a`` shifts position and ``b`` shifts momentum, both by whole grid
    steps; indices are reduced mod N before the phase is formed.
    """
    N = space.N
    a %= N
    b %= N
    phase = np.exp(1j * np.pi * a * b / N)
    # X^a Z^b |j> = w^(bj) |j+a>
    T = np.zeros((N, N), dtype=complex)
    j = np.arange(N)
    T[(j + a) % N, j] = np.exp(2j * np.pi * b * j / N)
    return phase * T


def coherent_state(space: TorusSpace, q: float, p: float) -> np.ndarray:
    """Normalised periodised Gaussian centred at ``(q, p)``."""
    return coherent_states(space, np.array([q]), np.array([p]))[:, 0]


def coherent_states(space: TorusSpace, qs, ps) -> np.ndarray:
    """Coherent states for paired centres ``(qs[i], ps[i])``, one per column."""
    N = space.N
    qs = np.asarray(qs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    qj = space.positions[:, None]
    psi = np.zeros((N, qs.size), dtype=complex)
    for w in range(-IMAGE_CUTOFF, IMAGE_CUTOFF + 1):
        x = qj - qs[None, :] + w
        psi += np.exp(-np.pi * N * x**2 + 2j * np.pi * N * ps[None, :] * x)
    psi /= np.linalg.norm(psi, axis=0)
    return psi


def grid_coordinates(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def husimi(space: TorusSpace, A: np.ndarray, nq: int | None = None, np_: int | None = None,
           hermitian_tol: float = 1e-10) -> HusimiGrid:
    """Husimi function ``<z|A|z>`` on an ``nq x np`` grid (default ``2N x 2N``).

    Hermitian operators give real grids; the imaginary part is dropped only
    after checking it is below ``hermitian_tol``.  Non-Hermitian input keeps
    its complex values.
    """
    A = np.asarray(A)
    N = space.N
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"operator must be square, got shape {A.shape}")
    if A.shape[0] != N:
        raise DimensionError(f"operator has dimension {A.shape[0]}, space has {N}")
    nq = 2 * N if nq is None else nq
    np_ = 2 * N if np_ is None else np_
    qs = grid_coordinates(nq)
    ps = grid_coordinates(np_)
    Q, P = np.meshgrid(qs, ps, indexing="ij")
    Zs = coherent_states(space, Q.ravel(), P.ravel())
    vals = np.einsum("ij,ij->j", Zs.conj(), A @ Zs).reshape(nq, np_)
    if np.allclose(A, A.conj().T, atol=hermitian_tol, rtol=0):
        imag = np.max(np.abs(vals.imag))
        if imag > hermitian_tol:
            raise ArithmeticError(f"Husimi of a Hermitian operator has imaginary part {imag:.3g}")
        vals = vals.real
    return HusimiGrid(qs, ps, vals)


def centre_momentum(grid: HusimiGrid) -> HusimiGrid:
    """Roll the momentum axis so that ``ps`` runs over ``[-1/2, 1/2)``."""
    npts = grid.ps.size
    if npts % 2:
        raise DimensionError("momentum grid size must be even to recentre")
    shift = npts // 2
    ps = np.roll(grid.ps, shift)
    ps = np.where(ps >= 0.5, ps - 1.0, ps)
    return HusimiGrid(grid.qs, ps, np.roll(grid.values, shift, axis=1))


def circular_mean(x, weights) -> float:
    """Weighted mean of a periodic coordinate on ``[0, 1)``."""
    w = np.asarray(weights, dtype=float)
    z = np.sum(w * np.exp(2j * np.pi * np.asarray(x))) / np.sum(w)
    return float(np.angle(z) / (2 * np.pi) % 1.0)


def husimi_centroid(grid: HusimiGrid) -> tuple[float, float]:
    """Circular centroid ``(q, p)`` of a non-negative Husimi grid."""
    vals = np.clip(np.real(grid.values), 0.0, None)
    return circular_mean(grid.qs, vals.sum(axis=1)), circular_mean(grid.ps, vals.sum(axis=0))


def torus_distance(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)
