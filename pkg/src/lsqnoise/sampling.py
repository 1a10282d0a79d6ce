"""Random variate generation for Gaussian, stable and stretched Gaussian noise.

Every sampler takes an :class:`RngStream` and an optional ``size``. With
``size=None`` a single float is returned, otherwise an ndarray.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .distributions import (
    GaussianParams,
    ParameterError,
    StableParams,
    StretchedGaussianParams,
    stretched_gaussian_norm,
)

__all__ = [
    "UnsupportedParameterError",
    "RngStream",
    "stream_id_for",
    "CmsIntermediates",
    "cms_intermediates",
    "sample_gaussian",
    "cms_standard_stable",
    "stable_shift_scale",
    "sample_stable",
    "Envelope",
    "stretched_gaussian_envelope",
    "StretchedGaussianRejectionSampler",
    "sample_stretched_gaussian_ar",
    "sample_stretched_gaussian_exact",
]

_U64 = 2**64
# |V -/+ pi/2| below this is redrawn to keep cos V away from zero
_EDGE = 1e-12


class UnsupportedParameterError(ParameterError):
    """Parameters are valid for the distribution but not for this sampler."""


class RngStream:
    """Reproducible uniform source identified by ``(seed, stream_id)``.

    Backed by the counter-based Philox generator. The stream is derived as
    ``SeedSequence(entropy=seed, spawn_key=(stream_id,))`` so distinct
    stream ids give statistically independent sequences and the same pair
    always gives the same sequence.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        for name, v in (("seed", seed), ("stream_id", stream_id)):
            if not isinstance(v, (int, np.integer)) or not 0 <= v < _U64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def uniform_open(self, size=None):
        """Uniform draws on the open interval (0, 1)."""
        u = self.generator.random(size)
        if size is None:
            while u == 0.0:
                u = self.generator.random()
            return u
        zero = u == 0.0
        while zero.any():
            u[zero] = self.generator.random(int(zero.sum()))
            zero = u == 0.0
        return u


def stream_id_for(*key) -> int:
    """Stable 64-bit stream id for a tuple key, independent of campaign iteration order."""
    text = "|".join(repr(k) for k in key).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


def _shape(size):
    return () if size is None else size


def _ret(arr, size):
    return float(arr) if size is None else arr


def sample_gaussian(rng: RngStream, p: GaussianParams, size=None):
    return rng.generator.normal(p.mu, p.sigma, size)


@dataclass(frozen=True)
class CmsIntermediates:
    V: np.ndarray
    W: np.ndarray
    L: float
    theta0: float


def _check_alpha_beta(alpha, beta):
    if not 0 < alpha <= 2:
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha!r}")
    if not -1 <= beta <= 1:
        raise ParameterError(f"beta must lie in [-1, 1], got {beta!r}")


def cms_intermediates(rng: RngStream, alpha: float, beta: float, size=None) -> CmsIntermediates:
    _check_alpha_beta(alpha, beta)
    n = int(np.prod(_shape(size), dtype=np.int64))
    u1 = rng.uniform_open(n)
    u2 = rng.uniform_open(n)
    V = math.pi * (u1 - 0.5)
    W = -np.log(u2)
    bad = (math.pi / 2 - np.abs(V) < _EDGE) | (W == 0.0)
    while bad.any():
        m = int(bad.sum())
        V[bad] = math.pi * (rng.uniform_open(m) - 0.5)
        W[bad] = -np.log(rng.uniform_open(m))
        bad = (math.pi / 2 - np.abs(V) < _EDGE) | (W == 0.0)
    t = math.tan(math.pi * alpha / 2)
    L = (1 + beta * beta * t * t) ** (1 / (2 * alpha))
    theta0 = math.atan(beta * t) / alpha
    return CmsIntermediates(V.reshape(_shape(size)), W.reshape(_shape(size)), L, theta0)


def cms_standard_stable(rng: RngStream, alpha: float, beta: float, size=None):
    """Standard (unit scale, zero location) stable variates by Chambers-Mallows-Stuck.

    Two uniforms are consumed per variate, apart from redraws at the
    measure-zero edges ``V = +-pi/2`` and ``W = 0``.
    """
    c = cms_intermediates(rng, alpha, beta, size)
    V, W = c.V, c.W
    if alpha == 1:
        half_pi = math.pi / 2
        bv = half_pi + beta * V
        x = (2 / math.pi) * (bv * np.tan(V) - beta * np.log(half_pi * W * np.cos(V) / bv))
    else:
        av = alpha * (V + c.theta0)
        x = (
            c.L
            * np.sin(av)
            / np.cos(V) ** (1 / alpha)
            * (np.cos(V - av) / W) ** ((1 - alpha) / alpha)
        )
    return _ret(x, size)


def stable_shift_scale(x_std, p: StableParams):
    """Map standard stable variates to location ``mu`` and scale ``sigma``."""
    if not p.sigma > 0:
        raise ParameterError(f"stable sampling needs sigma > 0, got {p.sigma!r}")
    out = p.sigma * np.asarray(x_std, dtype=float) + p.mu
    if p.alpha == 1:
        out = out + (2 / math.pi) * p.beta * p.sigma * math.log(p.sigma)
    return out.item() if np.ndim(x_std) == 0 else out


def sample_stable(rng: RngStream, p: StableParams, size=None):
    if not p.sigma > 0:
        raise ParameterError(f"stable sampling needs sigma > 0, got {p.sigma!r}")
    return stable_shift_scale(cms_standard_stable(rng, p.alpha, p.beta, size), p)


@dataclass(frozen=True)
class Envelope:
    """Proposal for the standardised stretched Gaussian ``z = (x - a) / sigma``.

    ``kind`` is ``"laplace"`` (density ``exp(-|z|/scale) / (2 scale)``) or
    ``"gaussian"`` (``N(0, scale**2)``). ``M`` bounds target/proposal.
    """

    kind: str
    scale: float
    M: float


def _log_target(z, beta):
    return math.log(stretched_gaussian_norm(beta)) - 0.5 * np.abs(z) ** beta


def _log_proposal(z, kind, scale):
    if kind == "laplace":
        return -np.abs(z) / scale - math.log(2 * scale)
    return -0.5 * (z / scale) ** 2 - math.log(scale * math.sqrt(2 * math.pi))


def _log_ratio(z, beta, kind, scale):
    return _log_target(z, beta) - _log_proposal(z, kind, scale)


def _log_envelope_constant(beta, kind, scale):
    # the log ratio is even and unimodal on z > 0; search in log z
    res = optimize.minimize_scalar(
        lambda u: -_log_ratio(math.exp(u), beta, kind, scale),
        bounds=(-20.0, 20.0), method="bounded", options={"xatol": 1e-12},
    )
    return max(-res.fun, _log_ratio(0.0, beta, kind, scale))


@lru_cache(maxsize=64)
def stretched_gaussian_envelope(beta: float) -> Envelope:
    """Envelope for the rejection sampler, chosen to minimise ``M``.

    Laplace proposal for ``1 <= beta < 2``, Gaussian for ``beta >= 2``.
    """
    if beta < 1:
        raise UnsupportedParameterError(
            f"rejection sampler needs stretched exponent beta >= 1, got {beta!r}; "
            "use the exact-transform sampler"
        )
    kind = "laplace" if beta < 2 else "gaussian"
    # below these scales the proposal tail is thinner than the target's
    lo = 2.0 if beta == 1 else (1.0 if beta == 2 else 0.05)
    res = optimize.minimize_scalar(
        lambda s: _log_envelope_constant(beta, kind, s),
        bounds=(lo, 20.0), method="bounded", options={"xatol": 1e-9},
    )
    scale = float(res.x)
    return Envelope(kind, scale, math.exp(_log_envelope_constant(beta, kind, scale)))


class StretchedGaussianRejectionSampler:
    """Acceptance-rejection sampler for the stretched Gaussian density.

    ``proposals`` and ``accepted`` count draws over the sampler's lifetime;
    ``accepted / proposals`` converges to ``1 / envelope.M``.
    """

    def __init__(self, p: StretchedGaussianParams):
        self.params = p
        self.envelope = stretched_gaussian_envelope(float(p.beta))
        self.proposals = 0
        self.accepted = 0

    def propose(self, rng: RngStream, m: int):
        """Run ``m`` proposals; return the accepted standardised values."""
        env = self.envelope
        g = rng.generator
        if env.kind == "laplace":
            z = g.laplace(0.0, env.scale, m)
        else:
            z = g.normal(0.0, env.scale, m)
        u = rng.uniform_open(m)
        keep = np.log(u) <= _log_ratio(z, self.params.beta, env.kind, env.scale) - math.log(env.M)
        self.proposals += m
        self.accepted += int(keep.sum())
        return z[keep]

    def sample(self, rng: RngStream, size=None):
        n = int(np.prod(_shape(size), dtype=np.int64))
        chunks, have = [], 0
        while have < n:
            need = n - have
            got = self.propose(rng, int(need * self.envelope.M * 1.1) + 16)
            chunks.append(got[:need])
            have += len(chunks[-1])
        z = np.concatenate(chunks) if chunks else np.empty(0)
        x = self.params.a + self.params.sigma * z.reshape(_shape(size))
        return _ret(x, size)


def sample_stretched_gaussian_ar(rng: RngStream, p: StretchedGaussianParams, size=None):
    return StretchedGaussianRejectionSampler(p).sample(rng, size)


def sample_stretched_gaussian_exact(rng: RngStream, p: StretchedGaussianParams, size=None):
    """Exact transform: ``X = a +- sigma * (2 G)**(1/beta)``, ``G ~ Gamma(1/beta)``."""
    g = rng.generator
    G = g.standard_gamma(1.0 / p.beta, size)
    sign = np.where(rng.uniform_open(size) < 0.5, -1.0, 1.0)
    x = p.a + sign * p.sigma * (2.0 * G) ** (1.0 / p.beta)
    return _ret(x, size)

