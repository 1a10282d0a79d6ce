"""Densities and distribution functions for the three noise families.

All functions accept scalars or arrays and broadcast like numpy ufuncs.
Scalars in give Python floats (or complex) out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "ParameterError",
    "GaussianParams",
    "StableParams",
    "OneSidedLevyParams",
    "StretchedGaussianParams",
    "gaussian_pdf",
    "gaussian_cdf",
    "stable_charfn",
    "levy_pdf",
    "levy_cdf",
    "stretched_gaussian_pdf",
    "stretched_gaussian_cdf",
    "stretched_gaussian_norm",
]


class ParameterError(ValueError):
    """A distribution parameter lies outside its domain."""


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class GaussianParams:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        _finite("mu", self.mu)
        if not _finite("sigma", self.sigma) > 0:
            raise ParameterError(f"gaussian sigma must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class StableParams:
    """Stable law parameters.

    ``sigma == 0`` is allowed here so that a degenerate configuration can be
    parsed and reported; the samplers refuse it.
    """

    alpha: float
    beta: float = 0.0
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not 0 < _finite("alpha", self.alpha) <= 2:
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha!r}")
        if not -1 <= _finite("beta", self.beta) <= 1:
            raise ParameterError(f"beta must lie in [-1, 1], got {self.beta!r}")
        _finite("mu", self.mu)
        if _finite("sigma", self.sigma) < 0:
            raise ParameterError(f"stable sigma must be >= 0, got {self.sigma!r}")


@dataclass(frozen=True)
class OneSidedLevyParams:
    mu: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        _finite("mu", self.mu)
        if not _finite("c", self.c) > 0:
            raise ParameterError(f"levy scale c must be > 0, got {self.c!r}")


@dataclass(frozen=True)
class StretchedGaussianParams:
    beta: float
    a: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not _finite("beta", self.beta) > 0:
            raise ParameterError(f"stretched exponent beta must be > 0, got {self.beta!r}")
        _finite("a", self.a)
        if not _finite("sigma", self.sigma) > 0:
            raise ParameterError(f"stretched sigma must be > 0, got {self.sigma!r}")


def _out(x, result):
    if np.ndim(x) == 0:
        return result.item()
    return result


def gaussian_pdf(x, p: GaussianParams):
    xa = np.asarray(x, dtype=float)
    z = (xa - p.mu) / p.sigma
    return _out(x, np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi * p.sigma**2))


def gaussian_cdf(x, p: GaussianParams):
    z = (np.asarray(x, dtype=float) - p.mu) / p.sigma
    return _out(x, 0.5 * special.erfc(-z / math.sqrt(2.0)))


def stable_charfn(k, p: StableParams):
    """Characteristic function ``E[exp(ikX)]`` of the stable law.

    Uses ``omega = tan(pi alpha / 2)`` for ``alpha != 1`` and
    ``omega = -(2/pi) ln|k|`` for ``alpha == 1``. At ``k == 0`` the result is
    exactly ``1 + 0j``.
    """
    ka = np.asarray(k, dtype=float)
    absk = np.abs(ka)
    sgn = np.sign(ka)
    if p.alpha == 1:
        with np.errstate(divide="ignore"):
            logk = np.where(absk > 0, np.log(np.where(absk > 0, absk, 1.0)), 0.0)
        omega = -2.0 / math.pi * logk
    else:
        omega = math.tan(math.pi * p.alpha / 2)
    expo = 1j * p.mu * ka - p.sigma**p.alpha * absk**p.alpha * (1 - 1j * p.beta * sgn * omega)
    return _out(k, np.exp(expo))


def levy_pdf(x, p: OneSidedLevyParams):
    """One-sided Levy density, zero on ``x <= mu``."""
    xa = np.asarray(x, dtype=float)
    t = xa - p.mu
    pos = t > 0
    ts = np.where(pos, t, 1.0)
    dens = math.sqrt(p.c / (2 * math.pi)) * np.exp(-p.c / (2 * ts)) / ts**1.5
    return _out(x, np.where(pos, dens, 0.0))


def levy_cdf(x, p: OneSidedLevyParams):
    xa = np.asarray(x, dtype=float)
    t = xa - p.mu
    pos = t > 0
    ts = np.where(pos, t, 1.0)
    return _out(x, np.where(pos, special.erfc(np.sqrt(p.c / (2 * ts))), 0.0))


def stretched_gaussian_norm(beta: float, sigma: float = 1.0) -> float:
    """Normalising constant ``beta / (2**(1 + 1/beta) * Gamma(1/beta) * sigma)``."""
    return beta / (2.0 ** (1.0 + 1.0 / beta) * special.gamma(1.0 / beta) * sigma)


def stretched_gaussian_pdf(x, p: StretchedGaussianParams):
    z = np.abs((np.asarray(x, dtype=float) - p.a) / p.sigma)
    return _out(x, stretched_gaussian_norm(p.beta, p.sigma) * np.exp(-0.5 * z**p.beta))


def stretched_gaussian_cdf(x, p: StretchedGaussianParams):
    # |X - a| = sigma * (2 G)**(1/beta) with G ~ Gamma(1/beta)
    z = (np.asarray(x, dtype=float) - p.a) / p.sigma
    half = 0.5 * special.gammainc(1.0 / p.beta, 0.5 * np.abs(z) ** p.beta)
    return _out(x, 0.5 + np.sign(z) * half)
