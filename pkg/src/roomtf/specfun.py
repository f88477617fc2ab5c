"""Spherical Bessel/Hankel functions, orthonormal spherical harmonics, Wigner 3-j.

All harmonics are complex orthonormal with the Condon-Shortley phase, matching
``scipy.special.sph_harm_y``.  Everything here is pure and reentrant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as _sp


@dataclass(frozen=True)
class HarmonicIndex:
    """Order/degree pair (n, m) with |m| <= n."""

    order: int
    degree: int

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be >= 0, got {self.order}")
        if abs(self.degree) > self.order:
            raise ValueError(
                f"|degree| must be <= order, got (n={self.order}, m={self.degree})"
            )

    @property
    def flat(self) -> int:
        """Zero-based flat index n^2 + n + m (the 1-based convention adds 1)."""
        return self.order * self.order + self.order + self.degree

    @classmethod
    def from_flat(cls, flat: int) -> "HarmonicIndex":
        n = math.isqrt(flat)
        return cls(n, flat - n * n - n)


def harmonic_indices(max_order: int) -> list[HarmonicIndex]:
    """All (n, m) with n <= max_order in flat-index order; length (N+1)^2."""
    return [
        HarmonicIndex(n, m) for n in range(max_order + 1) for m in range(-n, n + 1)
    ]


def mode_count(max_order: int) -> int:
    return (max_order + 1) ** 2


def spherical_bessel_j(n: int, x) -> float:
    """j_n(x); j_0(0) = 1 and j_n(0) = 0 for n > 0."""
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    return _sp.spherical_jn(n, x)


def spherical_bessel_y(n: int, x) -> float:
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    return _sp.spherical_yn(n, x)


def spherical_hankel_h1(n: int, x) -> complex:
    """h_n(x) = j_n(x) + i y_n(x), first kind.  Singular at x = 0."""
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    if np.any(np.asarray(x) <= 0):
        raise ValueError("spherical_hankel_h1 requires x > 0")
    return _sp.spherical_jn(n, x) + 1j * _sp.spherical_yn(n, x)


def spherical_harmonic(idx: HarmonicIndex, theta, phi) -> complex:
    """Orthonormal complex Y_nm(theta, phi), Condon-Shortley phase."""
    return _sp.sph_harm_y(idx.order, idx.degree, theta, phi)


# Vectorized basis tables used by the matrix builders downstream.  Rows run over
# the flat (n, m) index, columns over the supplied points.

def harmonic_matrix(max_order: int, theta, phi) -> np.ndarray:
    """Y_nm at each point: shape ((N+1)^2, P)."""
    idx = harmonic_indices(max_order)
    n = np.array([i.order for i in idx])[:, None]
    m = np.array([i.degree for i in idx])[:, None]
    return _sp.sph_harm_y(n, m, np.atleast_1d(theta)[None, :], np.atleast_1d(phi)[None, :])


def bessel_j_matrix(max_order: int, x) -> np.ndarray:
    """j_n at each point, repeated per degree: shape ((N+1)^2, P)."""
    idx = harmonic_indices(max_order)
    n = np.array([i.order for i in idx])[:, None]
    return _sp.spherical_jn(n, np.atleast_1d(x)[None, :])


def hankel_h1_matrix(max_order: int, x) -> np.ndarray:
    """h_n at each point, repeated per degree: shape ((N+1)^2, P)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("hankel_h1_matrix requires x > 0")
    idx = harmonic_indices(max_order)
    n = np.array([i.order for i in idx])[:, None]
    return _sp.spherical_jn(n, x[None, :]) + 1j * _sp.spherical_yn(n, x[None, :])


def _lf(n: int) -> float:
    return math.lgamma(n + 1)


@lru_cache(maxsize=None)
def wigner_3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3-j symbol via the Racah single-sum formula with log-factorials.

    Selection-rule failures return exactly 0.0 (the mathematical value).
    Stable for j up to ~40, far beyond the orders needed here.
    """
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if m1 + m2 + m3 != 0 or not abs(j1 - j2) <= j3 <= j1 + j2:
        return 0.0
    pref = 0.5 * (
        _lf(j1 + j2 - j3) + _lf(j1 - j2 + j3) + _lf(-j1 + j2 + j3)
        - _lf(j1 + j2 + j3 + 1)
        + _lf(j1 + m1) + _lf(j1 - m1)
        + _lf(j2 + m2) + _lf(j2 - m2)
        + _lf(j3 + m3) + _lf(j3 - m3)
    )
    tmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    tmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = 0.0
    for t in range(tmin, tmax + 1):
        denom = (
            _lf(t) + _lf(j3 - j2 + m1 + t) + _lf(j3 - j1 - m2 + t)
            + _lf(j1 + j2 - j3 - t) + _lf(j1 - m1 - t) + _lf(j2 + m2 - t)
        )
        total += (-1) ** t * math.exp(pref - denom)
    return (-1) ** (j1 - j2 - m3) * total
