"""Flat ``key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
Lists are comma separated and ``seeds`` also accepts an inclusive range
``first..last``. Unknown or repeated keys are errors.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Optional

from .experiment import DEFAULT_LEVELS, DEFAULT_MODELS, noise_preset
from .fitting import Family, ModelSpec

__all__ = ["ConfigError", "RunConfig", "parse_bool"]

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


class ConfigError(ValueError):
    """Bad configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _floats(text):
    return tuple(float(v) for v in _split(text))


def _split(text):
    items = [v.strip() for v in text.split(",")]
    if not all(items):
        raise ValueError(f"empty item in list {text!r}")
    return items


def _seeds(text):
    t = text.strip()
    if ".." in t:
        lo, hi = (int(v) for v in t.split(".."))
        if hi < lo:
            raise ValueError(f"empty seed range {t!r}")
        return tuple(range(lo, hi + 1))
    return tuple(int(v) for v in _split(t))


def _fmt_seeds(seeds):
    if len(seeds) > 2 and all(b - a == 1 for a, b in zip(seeds, seeds[1:])):
        return f"{seeds[0]}..{seeds[-1]}"
    return ", ".join(str(s) for s in seeds)


def _fmt_floats(vals):
    return ", ".join(repr(float(v)) for v in vals)


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise ValueError(f"must be an unsigned 64-bit integer, got {v}")
    return v


_DEFAULT_PARAMS = {m.family.value: m.true_params for m in DEFAULT_MODELS}


@dataclass(frozen=True)
class RunConfig:
    models: tuple = tuple(f.value for f in Family)
    noises: tuple = ("FA", "FB", "FC")
    levels: tuple = DEFAULT_LEVELS
    seeds: tuple = (0,)
    n: int = 200
    seed: Optional[int] = None
    out: str = "results"
    plots: bool = False
    fb_sigma: float = 1.0
    centered: bool = True
    stretched_method: str = "ar"
    workers: int = 1
    linear_params: tuple = _DEFAULT_PARAMS["linear"]
    quadratic_params: tuple = _DEFAULT_PARAMS["quadratic"]
    exponential_params: tuple = _DEFAULT_PARAMS["exponential"]

    def validate(self) -> "RunConfig":
        for name in ("models", "noises", "levels", "seeds"):
            if not getattr(self, name):
                raise ConfigError(name, "must be nonempty")
        specs = []
        for name in self.models:
            try:
                fam = Family(name)
            except ValueError:
                raise ConfigError("models", f"unknown model family {name!r}") from None
            try:
                specs.append(ModelSpec(fam, getattr(self, f"{fam.value}_params")))
            except ValueError as exc:
                raise ConfigError(f"{fam.value}_params", str(exc)) from None
        for name in self.noises:
            if name.upper() not in ("FA", "FB", "FC"):
                raise ConfigError("noises", f"unknown noise family {name!r}; expected FA, FB or FC")
        if len(set(self.noises)) != len(self.noises):
            raise ConfigError("noises", "duplicate noise family")
        for lv in self.levels:
            if not 0 < lv <= 100:
                raise ConfigError("levels", f"level {lv!r} outside (0, 100]")
        for s in self.seeds:
            if not 0 <= s < 2**32:
                raise ConfigError("seeds", f"trial seed {s!r} outside [0, 2**32)")
        if self.n < max([2] + [m.family.n_params for m in specs]):
            raise ConfigError("n", f"n={self.n} too small for the requested models")
        if self.fb_sigma < 0:
            raise ConfigError("fb_sigma", "must be >= 0")
        if self.stretched_method not in ("ar", "exact"):
            raise ConfigError("stretched_method", "must be 'ar' or 'exact'")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        return self

    def model_specs(self) -> tuple:
        out = []
        for name in self.models:
            fam = Family(name)
            out.append(ModelSpec(fam, getattr(self, f"{fam.value}_params")))
        return tuple(out)

    def noise_specs(self) -> tuple:
        return tuple(
            replace(noise_preset(nm, fb_sigma=self.fb_sigma, centered=self.centered),
                    method=self.stretched_method)
            for nm in self.noises
        )

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in _PARSERS:
                raise ConfigError(key, f"unknown key (line {lineno})")
            if key in values:
                raise ConfigError(key, f"repeated key (line {lineno})")
            try:
                values[key] = _PARSERS[key](val)
            except ValueError as exc:
                raise ConfigError(key, str(exc)) from None
        return cls(**values).validate()

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            lines.append(f"{f.name} = {_FORMATTERS[f.name](v)}")
        return "\n".join(lines) + "\n"


_PARSERS = {
    "models": lambda t: tuple(Family(v.lower()).value for v in _split(t)),
    "noises": lambda t: tuple(v.upper() for v in _split(t)),
    "levels": _floats,
    "seeds": _seeds,
    "n": int,
    "seed": _u64,
    "out": str,
    "plots": parse_bool,
    "fb_sigma": float,
    "centered": parse_bool,
    "stretched_method": str,
    "workers": int,
    "linear_params": _floats,
    "quadratic_params": _floats,
    "exponential_params": _floats,
}

_FORMATTERS = {
    "models": ", ".join,
    "noises": ", ".join,
    "levels": _fmt_floats,
    "seeds": _fmt_seeds,
    "n": str,
    "seed": str,
    "out": str,
    "plots": lambda b: "true" if b else "false",
    "fb_sigma": repr,
    "centered": lambda b: "true" if b else "false",
    "stretched_method": str,
    "workers": str,
    "linear_params": _fmt_floats,
    "quadratic_params": _fmt_floats,
    "exponential_params": _fmt_floats,
}
