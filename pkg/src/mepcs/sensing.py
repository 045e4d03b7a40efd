"""Gaussian measurement matrices and the linear measurement model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericError, ShapeError
from .sources import make_rng


def generate_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """m x n matrix of i.i.d. N(0, 1) entries.

    Entries are drawn in row-major order from a Philox stream, so the first
    ``m`` rows of ``generate_matrix(m2, n, seed)`` equal
    ``generate_matrix(m, n, seed)`` for any ``m2 >= m``.
    """
    if m < 1 or n < 1:
        raise InvalidInputError(f"matrix dimensions must be positive, got {m}x{n}")
    return make_rng(seed).standard_normal((m, n))


@dataclass(frozen=True, eq=False)
class SensingSystem:
    A: np.ndarray
    lam: float
    seed: int | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.ndim != 2 or 0 in A.shape:
            raise ShapeError("A must be a nonempty matrix")
        if not self.lam > 0:
            raise InvalidInputError(f"lambda must be positive, got {self.lam}")
        object.__setattr__(self, "A", A)

    @classmethod
    def gaussian(cls, m: int, n: int, seed: int, lam: float) -> "SensingSystem":
        return cls(generate_matrix(m, n, seed), lam, seed)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


def measure(A: np.ndarray, x) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != A.shape[1]:
        raise ShapeError(f"signal has length {x.size}, matrix expects {A.shape[1]}")
    return A @ x


def residual_norm_sq(A: np.ndarray, u, y) -> float:
    """``||A u - y||^2``."""
    y = np.asarray(y, dtype=float).reshape(-1)
    Au = measure(A, u)
    if y.size != Au.size:
        raise ShapeError(f"measurement has length {y.size}, expected {Au.size}")
    r = Au - y
    return float(r @ r)


def max_singular_value(A: np.ndarray, tol: float = 1e-8, max_iter: int = 10_000, seed: int = 0) -> float:
    """Largest singular value by power iteration on ``A^T A``.

    Stops once the eigen-residual ``||A^T A v - s^2 v||`` falls below
    ``tol * s^2``; the returned value is ``||A v||`` for the final unit ``v``.
    """
    A = np.asarray(A, dtype=float)
    v = make_rng(seed).standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        Av = A @ v
        w = A.T @ Av
        rayleigh = float(Av @ Av)
        if rayleigh == 0.0:
            return 0.0
        if np.linalg.norm(w - rayleigh * v) <= tol * rayleigh:
            return float(np.sqrt(rayleigh))
        v = w / np.linalg.norm(w)
    raise NumericError(f"power iteration did not converge in {max_iter} steps")


def spectral_event_bound(m: int, n: int) -> float:
    """``sqrt(n) + 2 sqrt(m)``, the high-probability ceiling on sigma_max."""
    return float(np.sqrt(n) + 2 * np.sqrt(m))


def write_matrix(path, A: np.ndarray) -> None:
    np.savetxt(path, np.asarray(A, dtype=float), fmt="%.17g", delimiter=",")


def read_matrix(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))
