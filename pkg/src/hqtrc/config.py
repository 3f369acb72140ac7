"""Flat ``key = value`` run configuration files."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields

from .c2f import PatchPlan, RankRule
from .corrupt import CorruptionError, CorruptionSpec
from .hqwtrr import SolverConfig
from .loss import AdaptiveC


class ConfigError(ValueError):
    pass


def _dims(text: str) -> tuple[int, ...] | None:
    text = text.strip()
    if text.lower() in ("", "none", "auto"):
        return None
    return tuple(int(v) for v in text.split(","))


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text: str) -> int | None:
    t = text.strip().lower()
    return None if t in ("", "none", "auto") else int(t)


def _opt_str(text: str) -> str | None:
    t = text.strip()
    return None if t.lower() in ("", "none") else t


@dataclass(frozen=True)
class RunConfig:
    # solver
    mu0: float = 1e-4
    lambda_factor: float = 2.0
    lambda_mode: str = "factor"
    alpha: float = 1.1
    d: int | None = None
    rank: int | None = None
    epsilon: float = 1e-3
    max_iters: int = 300
    min_iters: int = 10
    estimator: str = "cauchy"
    eta: float = 4.0
    c_min: float = 0.15
    c_signed: bool = False
    # patches
    m: int = 36
    o: int = 18
    l: int = 2
    sigma_w: float = 0.3
    w0: float = 0.2
    global_coeff: float = 0.2
    local_coeff: float = 0.5
    global_dims: tuple[int, ...] | None = None
    shifted_aggregation: bool = False
    workers: int = 1
    # corruption / experiment
    mask: str = "uniform:0.5"
    noise: str = "gmm:0.001,0.25,0.5"
    seed: int = 0
    runs: int = 20
    input: str | None = None
    timing: bool = True

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            mu0=self.mu0, lambda_factor=self.lambda_factor, lambda_mode=self.lambda_mode,
            alpha=self.alpha, d=self.d, ranks=None if self.rank is None else (self.rank,),
            epsilon=self.epsilon, max_iters=self.max_iters, min_iters=self.min_iters,
            estimator=self.estimator, adaptive=AdaptiveC(self.eta, self.c_min, self.c_signed),
        )

    def patch_plan(self) -> PatchPlan:
        return PatchPlan(self.m, self.o, self.l, self.sigma_w, self.w0)

    def rank_rule(self) -> RankRule:
        return RankRule(self.global_coeff, self.local_coeff)

    def corruption(self, seed: int | None = None) -> CorruptionSpec:
        return CorruptionSpec.parse(self.mask, self.noise, self.seed if seed is None else seed)

    def validate(self) -> "RunConfig":
        try:
            self.solver_config()
            self.patch_plan()
            self.rank_rule()
            self.corruption()
        except (ValueError, CorruptionError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.runs < 1 or self.workers < 1:
            raise ConfigError("runs and workers must be >= 1")
        return self

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                v = "none"
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, tuple):
                v = ",".join(str(i) for i in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_PARSERS = {
    "d": _opt_int, "rank": _opt_int, "global_dims": _dims, "input": _opt_str,
    "c_signed": _bool, "shifted_aggregation": _bool, "timing": _bool,
}


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    types = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        val = val.strip()
        try:
            if key in _PARSERS:
                values[key] = _PARSERS[key](val)
            elif types[key] in ("float",):
                values[key] = float(val)
            elif types[key] in ("int",):
                values[key] = int(val)
            else:
                values[key] = val
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return RunConfig(**values).validate()


def load_config(path: str | os.PathLike | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return dataclasses.replace(cfg, **kw).validate()
