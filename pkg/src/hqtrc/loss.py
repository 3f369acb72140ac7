"""M-estimator losses, half-quadratic weights and the adaptive shape rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FAMILIES = ("huber", "welsch", "cauchy")


@dataclass(frozen=True)
class Estimator:
    """A loss family with shape parameter ``c``.

    Welsch:  c^2 (1 - exp(-x^2 / 2c^2))
    Cauchy:  c^2/2 * log(1 + x^2/c^2)
    Huber:   x^2/2 for |x| <= c, else c|x| - c^2/2
    """

    family: str = "cauchy"
    c: float = 1.0

    def __post_init__(self):
        fam = self.family.lower()
        if fam not in FAMILIES:
            raise ValueError(f"unknown estimator family {self.family!r}; expected one of {FAMILIES}")
        if not self.c > 0:
            raise ValueError(f"shape parameter must be positive, got {self.c}")
        object.__setattr__(self, "family", fam)

    def with_c(self, c: float) -> "Estimator":
        return Estimator(self.family, c)

    def loss(self, x):
        x = np.asarray(x, dtype=np.float64)
        c = self.c
        if self.family == "welsch":
            return c * c * -np.expm1(-(x * x) / (2 * c * c))
        if self.family == "cauchy":
            return 0.5 * c * c * np.log1p((x * x) / (c * c))
        ax = np.abs(x)
        return np.where(ax <= c, 0.5 * x * x, c * ax - 0.5 * c * c)

    def derivative(self, x):
        x = np.asarray(x, dtype=np.float64)
        c = self.c
        if self.family == "welsch":
            return x * np.exp(-(x * x) / (2 * c * c))
        if self.family == "cauchy":
            return x / (1 + (x * x) / (c * c))
        return np.clip(x, -c, c)

    def weight(self, x):
        """f'(x)/x, continuously extended with weight(0) = 1."""
        x = np.asarray(x, dtype=np.float64)
        c = self.c
        if self.family == "welsch":
            return np.exp(-(x * x) / (2 * c * c))
        if self.family == "cauchy":
            return 1 / (1 + (x * x) / (c * c))
        ax = np.abs(x)
        return np.where(ax <= c, 1.0, c / np.maximum(ax, c))

    def dual(self, q):
        """Half-quadratic dual phi(q) with f(t) = min_q q t^2 / 2 + phi(q), q in (0, 1]."""
        q = np.asarray(q, dtype=np.float64)
        c2 = self.c * self.c
        if self.family == "welsch":
            return c2 * (1 - q + q * np.log(q))
        if self.family == "cauchy":
            return 0.5 * c2 * (q - np.log(q) - 1)
        return 0.5 * c2 * (1 / q - 1)


def weight_tensor(est: Estimator, residual, support) -> np.ndarray:
    residual = np.asarray(residual, dtype=np.float64)
    support = np.asarray(support)
    if residual.shape != support.shape:
        raise ValueError(f"shape mismatch: {residual.shape} vs {support.shape}")
    return np.where(support != 0, est.weight(residual), 0.0)


@dataclass(frozen=True)
class AdaptiveC:
    """c = max(eta * max(q25, q75), c_min) over the residuals on the support.

    With ``signed=False`` (default) the inner max compares quantile
    magnitudes; ``signed=True`` takes the max of the signed quantiles.
    """

    eta: float = 4.0
    c_min: float = 0.15
    signed: bool = False

    def __post_init__(self):
        if not self.eta > 0 or not self.c_min > 0:
            raise ValueError("eta and c_min must be positive")

    def __call__(self, residuals) -> float:
        return adapt_c(self, residuals)


def adapt_c(cfg: AdaptiveC, residuals) -> float:
    e = np.asarray(residuals, dtype=np.float64).ravel()
    if e.size == 0:
        raise ValueError("adaptive c needs at least one residual")
    q25, q75 = np.quantile(e, [0.25, 0.75], method="linear")
    spread = max(q25, q75) if cfg.signed else max(abs(q25), abs(q75))
    return float(max(cfg.eta * spread, cfg.c_min))
