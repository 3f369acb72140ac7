"""Observation masks, additive/impulsive noise models and PSNR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import text_bitmap
from .rng import Streams

MASK_KINDS = ("uniform", "bernoulli", "rows", "watermark", "moving-watermark", "raindrop")
NOISE_KINDS = ("none", "gaussian", "gmm", "salt-pepper", "random-value")
_NOISE_ALIASES = {"sp": "salt-pepper", "rv": "random-value", "gauss": "gaussian"}
_NOISE_ARITY = {"none": 0, "gaussian": 1, "gmm": 3, "salt-pepper": 1, "random-value": 1}


class CorruptionError(ValueError):
    pass


def _parse_kind(text: str) -> tuple[str, tuple[float, ...]]:
    kind, _, args = text.strip().partition(":")
    try:
        params = tuple(float(a) for a in args.split(",")) if args else ()
    except ValueError:
        raise CorruptionError(f"bad numeric parameters in {text!r}") from None
    return kind.strip().lower(), params


@dataclass(frozen=True)
class CorruptionSpec:
    """Mask ``kind:params`` plus noise ``kind:params``.

    Masks: ``uniform:p`` (exactly round(p * size) observed entries),
    ``bernoulli:p``, ``rows:fraction`` (observed rows per frame),
    ``watermark``, ``moving-watermark``, ``raindrop:density``.
    Noise: ``none``, ``gaussian:var``, ``gmm:var_a,var_b,gamma``,
    ``salt-pepper:gamma``, ``random-value:gamma``.
    """

    mask: str = "uniform"
    mask_params: tuple[float, ...] = (0.5,)
    noise: str = "none"
    noise_params: tuple[float, ...] = ()
    seed: int = 0

    def __post_init__(self):
        noise = _NOISE_ALIASES.get(self.noise, self.noise)
        object.__setattr__(self, "noise", noise)
        if self.mask not in MASK_KINDS:
            raise CorruptionError(f"unknown mask kind {self.mask!r}")
        if noise not in NOISE_KINDS:
            raise CorruptionError(f"unknown noise kind {self.noise!r}")
        if len(self.noise_params) != _NOISE_ARITY[noise]:
            raise CorruptionError(f"noise {noise!r} takes {_NOISE_ARITY[noise]} parameter(s)")
        if self.mask in ("uniform", "bernoulli", "rows", "raindrop"):
            if len(self.mask_params) != 1 or not 0 <= self.mask_params[0] <= 1:
                raise CorruptionError(f"mask {self.mask!r} needs one parameter in [0, 1]")
        if noise in ("salt-pepper", "random-value") and not 0 <= self.noise_params[0] <= 1:
            raise CorruptionError("gamma must lie in [0, 1]")
        if noise == "gaussian" and self.noise_params[0] < 0:
            raise CorruptionError("variance must be >= 0")
        if noise == "gmm":
            va, vb, gamma = self.noise_params
            if va < 0 or vb < 0 or not 0 <= gamma <= 1:
                raise CorruptionError("gmm needs variances >= 0 and gamma in [0, 1]")

    @classmethod
    def parse(cls, mask: str = "uniform:0.5", noise: str = "none", seed: int = 0) -> "CorruptionSpec":
        mk, mp = _parse_kind(mask)
        nk, np_ = _parse_kind(noise)
        if mk == "raindrop" and not mp:
            mp = (0.1,)
        return cls(mk, mp, nk, np_, int(seed))

    def mask_text(self) -> str:
        return self.mask + (":" + ",".join(f"{v:g}" for v in self.mask_params) if self.mask_params else "")

    def noise_text(self) -> str:
        return self.noise + (":" + ",".join(f"{v:g}" for v in self.noise_params) if self.noise_params else "")


def _fixed_count_mask(shape, p, rng) -> np.ndarray:
    size = int(np.prod(shape))
    chosen = rng.choice(size, size=int(round(p * size)), replace=False)
    flat = np.zeros(size)
    flat[chosen] = 1.0
    return flat.reshape(shape, order="F")


def _frames(shape) -> int:
    return int(np.prod(shape[3:])) if len(shape) > 3 else 1


def _per_frame(shape, draw) -> np.ndarray:
    """Build an I1 x I2 pattern per frame and broadcast it over channels."""
    h, w = shape[:2]
    nf = _frames(shape)
    pats = np.stack([draw(h, w, f, nf) for f in range(nf)], axis=-1)  # h x w x nf
    pats = pats.reshape((h, w, 1) + tuple(shape[3:]), order="F")
    return np.broadcast_to(pats, shape).astype(np.float64)


def _stamp(h, w, scale) -> np.ndarray:
    bmp = text_bitmap()
    bmp = np.kron(bmp, np.ones((scale, scale), dtype=bool))
    return bmp[:h, :w]


def make_mask(shape, spec: CorruptionSpec, rng: np.random.Generator) -> np.ndarray:
    shape = tuple(shape)
    kind = spec.mask
    if kind == "uniform":
        return _fixed_count_mask(shape, spec.mask_params[0], rng)
    if kind == "bernoulli":
        return (rng.random(shape) < spec.mask_params[0]).astype(np.float64)
    if len(shape) < 2:
        raise CorruptionError(f"mask {kind!r} needs at least two spatial modes")
    if kind == "rows":
        frac = spec.mask_params[0]

        def rows(h, w, f, nf):
            pat = np.zeros((h, w))
            pat[rng.choice(h, size=int(round(frac * h)), replace=False)] = 1
            return pat
        return _per_frame(shape, rows)
    if kind == "watermark":
        def fixed(h, w, f, nf):
            scale = max(1, w // text_bitmap().shape[1])
            stamp = _stamp(h, w, scale)
            pat = np.ones((h, w))
            # repeat the sentence down the frame every other text line
            step = 2 * 7 * scale
            for top in range(scale, h, step):
                sub = stamp[: max(0, min(stamp.shape[0], h - top))]
                pat[top:top + sub.shape[0], : sub.shape[1]][sub] = 0
            return pat
        return _per_frame(shape, fixed)
    if kind == "moving-watermark":
        def moving(h, w, f, nf):
            stamp = _stamp(h, w, 1)
            sh, sw = stamp.shape
            frac = f / (nf - 1) if nf > 1 else 0.0
            top = int(round(frac * (h - sh)))
            left = int(round(frac * (w - sw)))
            pat = np.ones((h, w))
            pat[top:top + sh, left:left + sw][stamp] = 0
            return pat
        return _per_frame(shape, moving)
    # raindrop: random vertical streaks, redrawn every frame
    density = spec.mask_params[0]

    def rain(h, w, f, nf):
        pat = np.ones((h, w))
        n_streaks = int(round(density * w))
        cols = rng.integers(0, w, size=n_streaks)
        lengths = rng.integers(max(1, h // 8), max(2, h // 3) + 1, size=n_streaks)
        tops = rng.integers(0, h, size=n_streaks)
        for c, ln, t in zip(cols, lengths, tops):
            pat[t:t + ln, c] = 0
        return pat
    return _per_frame(shape, rain)


def _fixed_count_subset(support_idx, gamma, rng):
    k = int(round(gamma * support_idx.size))
    return rng.choice(support_idx, size=k, replace=False)


def add_noise(x: np.ndarray, mask: np.ndarray, spec: CorruptionSpec, rng: np.random.Generator) -> np.ndarray:
    """Noise on observed entries only; returns a new tensor."""
    out = np.array(x, dtype=np.float64).ravel(order="F")
    support = np.flatnonzero(np.asarray(mask).ravel(order="F") != 0)
    kind, params = spec.noise, spec.noise_params
    if kind == "gaussian":
        out[support] += rng.normal(0.0, np.sqrt(params[0]), size=support.size)
    elif kind == "gmm":
        va, vb, gamma = params
        outlier = rng.random(support.size) < gamma
        sd = np.where(outlier, np.sqrt(vb), np.sqrt(va))
        out[support] += sd * rng.standard_normal(support.size)
    elif kind == "salt-pepper":
        hit = _fixed_count_subset(support, params[0], rng)
        out[hit] = rng.integers(0, 2, size=hit.size).astype(np.float64)
    elif kind == "random-value":
        hit = _fixed_count_subset(support, params[0], rng)
        out[hit] = rng.random(hit.size)
    return out.reshape(np.shape(x), order="F")


def corrupt(clean, spec: CorruptionSpec) -> tuple[np.ndarray, np.ndarray]:
    """Returns (observed, mask); unobserved entries of ``observed`` are zero."""
    clean = np.asarray(clean, dtype=np.float64)
    streams = Streams(spec.seed)
    mask = make_mask(clean.shape, spec, streams("mask"))
    noisy = add_noise(clean, mask, spec, streams("noise"))
    return noisy * mask, mask


def psnr(reference, estimate, peak: float = 1.0) -> float:
    """10 log10(peak^2 / MSE) over all entries; ``inf`` when MSE == 0."""
    reference = np.asarray(reference, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if reference.shape != estimate.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {estimate.shape}")
    mse = float(np.mean((reference - estimate) ** 2))
    if mse == 0:
        return float("inf")
    return 10 * np.log10(peak * peak / mse)
