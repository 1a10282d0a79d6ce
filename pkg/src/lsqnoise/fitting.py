"""Linear-in-parameters least squares for the three model families."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateDesignError",
    "Family",
    "ModelSpec",
    "FitResult",
    "CONDITION_LIMIT",
    "basis",
    "design_matrix",
    "solve_least_squares",
    "evaluate_model",
    "fit",
]

CONDITION_LIMIT = 1e12


class DegenerateDesignError(ValueError):
    """Design matrix is rank deficient to working precision."""


class Family(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    EXPONENTIAL = "exponential"

    @property
    def n_params(self) -> int:
        return _N_PARAMS[self]

    def __str__(self):
        return self.value


_N_PARAMS = {Family.LINEAR: 2, Family.QUADRATIC: 3, Family.EXPONENTIAL: 4}


@dataclass(frozen=True)
class ModelSpec:
    """A model family with its true parameters.

    Linear ``a x + b``, quadratic ``a x^2 + b x + c`` and exponential
    ``a e^{3x} + b e^{-x} - c x + d``; the leading coefficient must be nonzero.
    """

    family: Family
    true_params: tuple

    def __post_init__(self):
        fam = Family(self.family)
        params = tuple(float(v) for v in self.true_params)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "true_params", params)
        if len(params) != fam.n_params:
            raise ValueError(f"{fam} model takes {fam.n_params} parameters, got {len(params)}")
        if not all(math.isfinite(v) for v in params):
            raise ValueError(f"{fam} parameters must be finite, got {params}")
        if params[0] == 0:
            raise ValueError(f"{fam} model needs a nonzero leading coefficient")


@dataclass(frozen=True)
class FitResult:
    params: np.ndarray
    sse: float
    condition_estimate: float


def design_matrix(family, xs) -> np.ndarray:
    x = np.asarray(xs, dtype=float)
    fam = Family(family)
    if fam is Family.LINEAR:
        cols = (x, np.ones_like(x))
    elif fam is Family.QUADRATIC:
        cols = (x * x, x, np.ones_like(x))
    else:
        cols = (np.exp(3 * x), np.exp(-x), -x, np.ones_like(x))
    return np.stack(cols, axis=-1)


def basis(family, x: float) -> tuple:
    return tuple(float(v) for v in design_matrix(family, float(x)))


def solve_least_squares(X, y) -> FitResult:
    """Minimise ``||y - X p||^2`` by Householder QR on column-scaled ``X``.

    Raises :class:`DegenerateDesignError` when the scaled design has a
    condition estimate above :data:`CONDITION_LIMIT`.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError(f"shape mismatch: design {X.shape}, observations {y.shape}")
    n, p = X.shape
    if n < p:
        raise DegenerateDesignError(f"{n} observations cannot determine {p} parameters")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("design and observations must be finite")
    norms = np.linalg.norm(X, axis=0)
    if (norms == 0).any():
        raise DegenerateDesignError("design has an all-zero column")
    Q, R = np.linalg.qr(X / norms)
    sv = np.linalg.svd(R, compute_uv=False)
    cond = math.inf if sv[-1] == 0 else float(sv[0] / sv[-1])
    if cond > CONDITION_LIMIT:
        raise DegenerateDesignError(f"design condition estimate {cond:.3g} exceeds {CONDITION_LIMIT:g}")
    params = np.linalg.solve(R, Q.T @ y) / norms
    resid = y - X @ params
    return FitResult(params, float(resid @ resid), cond)


def evaluate_model(family, params, xs):
    fam = Family(family)
    params = np.asarray(params, dtype=float)
    if params.shape != (fam.n_params,):
        raise ValueError(f"{fam} model takes {fam.n_params} parameters, got {params.shape}")
    out = design_matrix(fam, xs) @ params
    return float(out) if np.ndim(xs) == 0 else out


def fit(family, xs, y) -> FitResult:
    return solve_least_squares(design_matrix(family, xs), y)
