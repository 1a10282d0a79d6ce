"""Noise-injection fitting trials and multi-seed campaigns.

A trial evaluates a true model on the grid ``x_i = i/n``, adds scaled noise,
refits by least squares and scores the fitted curve against the truth with
the maximum absolute error (``rerr1``) and the root mean square error
(``rerr2``). A campaign runs the full product of models, noise families,
levels and seeds, each cell on its own random stream.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Sequence, Union

import numpy as np
from scipy import stats

from .distributions import GaussianParams, StableParams, StretchedGaussianParams
from .fitting import Family, FitResult, ModelSpec, evaluate_model, fit
from .sampling import (
    RngStream,
    sample_gaussian,
    sample_stable,
    sample_stretched_gaussian_ar,
    sample_stretched_gaussian_exact,
    stream_id_for,
)

__all__ = [
    "NoiseSpec",
    "FA",
    "FB",
    "FC",
    "PRINTED_FB_SIGMA",
    "DEFAULT_LEVELS",
    "DEFAULT_MODELS",
    "noise_preset",
    "make_grid",
    "inject_noise",
    "rerr1",
    "rerr2",
    "TrialConfig",
    "TrialResult",
    "run_trial",
    "CampaignRow",
    "CampaignReport",
    "CellError",
    "OrderingStats",
    "run_campaign",
    "replay_cell",
    "ordering_check",
]

NoiseParams = Union[GaussianParams, StableParams, StretchedGaussianParams]


@dataclass(frozen=True)
class NoiseSpec:
    """A named noise family.

    With ``centered`` the family's location is subtracted from each raw draw
    before scaling, so only the spread of the noise reaches the data. With
    ``centered=False`` the raw draw (location included) is scaled as is.
    ``method`` picks the stretched Gaussian sampler, ``"ar"`` or ``"exact"``.
    """

    name: str
    params: NoiseParams
    centered: bool = True
    method: str = "ar"

    def __post_init__(self):
        if not isinstance(self.params, (GaussianParams, StableParams, StretchedGaussianParams)):
            raise TypeError(f"unsupported noise parameters {self.params!r}")
        if self.method not in ("ar", "exact"):
            raise ValueError(f"method must be 'ar' or 'exact', got {self.method!r}")

    @property
    def location(self) -> float:
        p = self.params
        return p.a if isinstance(p, StretchedGaussianParams) else p.mu

    def draw(self, rng: RngStream, size=None):
        p = self.params
        if isinstance(p, GaussianParams):
            return sample_gaussian(rng, p, size)
        if isinstance(p, StableParams):
            return sample_stable(rng, p, size)
        if self.method == "exact":
            return sample_stretched_gaussian_exact(rng, p, size)
        return sample_stretched_gaussian_ar(rng, p, size)


# FB is printed with sigma = 0, which is a point mass; unit scale is used instead.
PRINTED_FB_SIGMA = 0.0
FA = NoiseSpec("FA", GaussianParams(mu=5.0, sigma=0.5))
FB = NoiseSpec("FB", StableParams(alpha=1.8, beta=0.0, mu=1.0, sigma=1.0))
FC = NoiseSpec("FC", StretchedGaussianParams(beta=2.5, a=1.0, sigma=3.0))

DEFAULT_LEVELS = (1.0, 5.0, 10.0, 15.0, 20.0)
DEFAULT_MODELS = (
    ModelSpec(Family.LINEAR, (5.0, 0.0)),
    ModelSpec(Family.QUADRATIC, (4.0, 3.0, 2.0)),
    ModelSpec(Family.EXPONENTIAL, (0.5, 0.2, 1.0, 1.0 / 3.0)),
)


def noise_preset(name: str, *, fb_sigma: float = 1.0, centered: bool = True) -> NoiseSpec:
    base = {"FA": FA, "FB": FB, "FC": FC}.get(name.upper())
    if base is None:
        raise ValueError(f"unknown noise family {name!r}; expected FA, FB or FC")
    if base is FB:
        base = replace(base, params=replace(FB.params, sigma=fb_sigma))
    return replace(base, centered=centered)


def make_grid(n: int) -> np.ndarray:
    """``n`` equally spaced abscissae ``i/n`` for ``i = 1..n``."""
    if n < 2:
        raise ValueError(f"grid needs at least 2 points, got {n}")
    return np.arange(1, n + 1, dtype=float) / n


def inject_noise(exact, noise: NoiseSpec, level_percent: float, rng: RngStream) -> np.ndarray:
    """Return ``exact + eps * level/100`` with ``eps`` drawn i.i.d. from ``noise``."""
    if not 0 < level_percent <= 100:
        raise ValueError(f"noise level must lie in (0, 100] percent, got {level_percent!r}")
    exact = np.asarray(exact, dtype=float)
    eps = noise.draw(rng, exact.shape)
    if noise.centered:
        eps = eps - noise.location
    return exact + eps * (level_percent / 100.0)


def _check_lengths(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError(f"curves must be equal-length nonempty vectors, got {a.shape} and {b.shape}")
    return a, b


def rerr1(fitted_curve, true_curve) -> float:
    F, f = _check_lengths(fitted_curve, true_curve)
    return float(np.max(np.abs(F - f)))


def rerr2(fitted_curve, true_curve) -> float:
    F, f = _check_lengths(fitted_curve, true_curve)
    d = F - f
    return math.sqrt(float(d @ d) / d.size)


@dataclass(frozen=True)
class TrialConfig:
    model: ModelSpec
    noise: NoiseSpec
    level_percent: float
    n: int = 200
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.n < max(2, self.model.family.n_params):
            raise ValueError(f"n={self.n} too small for the {self.model.family} model")
        if not 0 < self.level_percent <= 100:
            raise ValueError(f"noise level must lie in (0, 100] percent, got {self.level_percent!r}")


@dataclass(frozen=True)
class TrialResult:
    fit: FitResult
    rerr1: float
    rerr2: float
    xs: np.ndarray = field(repr=False)
    truth: np.ndarray = field(repr=False)
    observed: np.ndarray = field(repr=False)
    fitted: np.ndarray = field(repr=False)


def run_trial(cfg: TrialConfig) -> TrialResult:
    rng = RngStream(cfg.seed, cfg.stream_id)
    xs = make_grid(cfg.n)
    family = cfg.model.family
    truth = evaluate_model(family, cfg.model.true_params, xs)
    observed = inject_noise(truth, cfg.noise, cfg.level_percent, rng)
    result = fit(family, xs, observed)
    fitted = evaluate_model(family, result.params, xs)
    return TrialResult(result, rerr1(fitted, truth), rerr2(fitted, truth), xs, truth, observed, fitted)


@dataclass(frozen=True)
class CampaignRow:
    model: str
    noise: str
    level_percent: float
    seed: int
    params: tuple
    rerr1: float
    rerr2: float

    @property
    def key(self):
        return (self.model, self.noise, self.level_percent, self.seed)


class CellError(RuntimeError):
    """A campaign cell failed; ``key`` is ``(model, noise, level, seed)``."""

    def __init__(self, key, cause):
        super().__init__(f"cell model={key[0]} noise={key[1]} level={key[2]:g}% seed={key[3]} failed: {cause}")
        self.key = key
        self.cause = str(cause)

    def __reduce__(self):
        return (CellError, (self.key, self.cause))


@dataclass(frozen=True)
class OrderingStats:
    """Seed-ensemble view of the error ordering at one (model, level).

    ``rerr1_fraction`` / ``rerr2_fraction`` are the fractions of seeds with
    ``FA < FC < FB``; ``fb_over_fa`` is the fraction with
    ``rerr2(FB) > rerr2(FA)`` and ``fb_over_fa_pvalue`` its one-sided
    binomial p-value against 1/2.
    """

    model: str
    level_percent: float
    n_seeds: int
    rerr1_fraction: float
    rerr2_fraction: float
    fb_over_fa: float
    fb_over_fa_pvalue: float
    median_rerr2: dict


def _cell_stream(master_seed, model, noise, level, seed):
    return RngStream(master_seed, stream_id_for(model.family.value, noise.name, float(level), int(seed)))


def replay_cell(master_seed, n, model: ModelSpec, noise: NoiseSpec, level, seed) -> TrialResult:
    """Re-run one campaign cell and return the full trial, curves included."""
    stream = _cell_stream(master_seed, model, noise, level, seed)
    return run_trial(TrialConfig(model, noise, float(level), n, stream.seed, stream.stream_id))


def _run_cell(args):
    master_seed, n, model, noise, level, seed = args
    key = (model.family.value, noise.name, float(level), int(seed))
    try:
        res = replay_cell(master_seed, n, model, noise, level, seed)
    except Exception as exc:  # reported with the cell key
        raise CellError(key, exc) from exc
    return CampaignRow(*key, tuple(float(v) for v in res.fit.params), res.rerr1, res.rerr2)


@dataclass
class CampaignReport:
    rows: list
    models: tuple
    noises: tuple
    levels: tuple
    seeds: tuple
    n: int
    master_seed: int

    def __post_init__(self):
        self._index = {r.key: r for r in self.rows}

    def cell(self, model, noise, level, seed) -> CampaignRow:
        return self._index[(str(model), noise, float(level), int(seed))]

    def ordering(self, model, level) -> OrderingStats:
        model = str(model)
        level = float(level)
        names = {nz.name for nz in self.noises}
        if not {"FA", "FB", "FC"} <= names:
            raise KeyError("ordering needs FA, FB and FC in the campaign")
        r1, r2, fb_gt = [], [], 0
        med = {}
        for seed in self.seeds:
            try:
                a, b, c = (self.cell(model, nm, level, seed) for nm in ("FA", "FB", "FC"))
            except KeyError:
                raise KeyError(f"missing cell for model={model} level={level:g} seed={seed}") from None
            r1.append(a.rerr1 < c.rerr1 < b.rerr1)
            r2.append(a.rerr2 < c.rerr2 < b.rerr2)
            fb_gt += b.rerr2 > a.rerr2
        for nm in ("FA", "FB", "FC"):
            med[nm] = float(np.median([self.cell(model, nm, level, s).rerr2 for s in self.seeds]))
        k = len(self.seeds)
        pval = float(stats.binomtest(fb_gt, k, 0.5, alternative="greater").pvalue)
        return OrderingStats(model, level, k, float(np.mean(r1)), float(np.mean(r2)),
                             fb_gt / k, pval, med)

    def ordering_table(self) -> list:
        return [self.ordering(m.family.value, lv) for m in self.models for lv in self.levels]


def ordering_check(report: CampaignReport, level, model) -> tuple:
    """Fractions of seeds with ``FA < FC < FB`` for rerr1 and rerr2."""
    o = report.ordering(model, level)
    return o.rerr1_fraction, o.rerr2_fraction


def run_campaign(
    models: Sequence[ModelSpec],
    noises: Sequence[NoiseSpec],
    levels: Sequence[float],
    seeds: Sequence[int],
    *,
    n: int = 200,
    master_seed: int = 0,
    workers: int = 1,
) -> CampaignReport:
    """Run every (model, noise, level, seed) cell.

    Rows come back in axis order whatever ``workers`` is; each cell's stream
    depends only on ``master_seed`` and the cell key.
    """
    if not (models and noises and levels and seeds):
        raise ValueError("campaign axes must be nonempty")
    names = [nz.name for nz in noises]
    if len(set(names)) != len(names):
        raise ValueError(f"noise family names must be unique, got {names}")
    cells = [(master_seed, n, m, nz, lv, sd) for m, nz, lv, sd in product(models, noises, levels, seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, cells, chunksize=max(1, len(cells) // (8 * workers))))
    else:
        rows = [_run_cell(c) for c in cells]
    return CampaignReport(rows, tuple(models), tuple(noises), tuple(float(v) for v in levels),
                          tuple(int(s) for s in seeds), n, master_seed)
