"""Difference-of-Gaussians kernels and multiscale edge maps.

The DoG models an ON-center retinal ganglion cell: a narrow excitatory
Gaussian of width ``sigma_c`` minus a wider inhibitory one of width
``surround_ratio * sigma_c``.  Both are sampled on the same square window
of radius ``ceil(window_ratio * sigma_c / 2)`` and renormalized after
truncation, so every kernel sums to zero.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.ndimage import correlate1d

from .imagecore import as_image

DEFAULT_SURROUND_RATIO = 1.6
DEFAULT_WINDOW_RATIO = 8.0

# Responses below this fraction of the input's peak magnitude are float
# round-off (e.g. 1.0 - 1.0 in a flat field) and are set to exactly zero.
ROUNDOFF_RTOL = 1e-12


@dataclass(frozen=True)
class DoGSpec:
    sigma_c: float
    surround_ratio: float = DEFAULT_SURROUND_RATIO
    window_ratio: float = DEFAULT_WINDOW_RATIO

    def __post_init__(self):
        if not self.sigma_c > 0:
            raise ValueError(f"sigma_c must be > 0, got {self.sigma_c}")
        if not self.surround_ratio > 1:
            raise ValueError(f"surround_ratio must be > 1, got {self.surround_ratio}")
        if not self.window_ratio >= 2:
            raise ValueError(f"window_ratio must be >= 2, got {self.window_ratio}")

    @property
    def sigma_s(self) -> float:
        return self.surround_ratio * self.sigma_c

    @property
    def radius(self) -> int:
        return max(1, math.ceil(self.window_ratio * self.sigma_c / 2))


def scale_schedule(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic schedule ``start, start+step, ... <= stop``.

    Values are generated by multiplication (not accumulation) and rounded to
    10 decimals, so ``0.5..6.0 step 0.5`` yields exactly twelve clean values.
    """
    if not start > 0:
        raise ValueError(f"schedule start must be > 0, got {start}")
    if not step > 0:
        raise ValueError(f"schedule step must be > 0, got {step}")
    if stop < start:
        raise ValueError(f"schedule stop {stop} is below start {start}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [float(round(start + i * step, 10)) for i in range(n)]


def check_schedule(schedule: Sequence[float]) -> list[float]:
    values = [float(v) for v in schedule]
    if not values:
        raise ValueError("scale schedule is empty")
    if any(v <= 0 for v in values):
        raise ValueError("scale schedule values must be positive")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("scale schedule must be strictly increasing")
    return values


def gaussian_kernel_1d(sigma: float, radius: int) -> np.ndarray:
    """Sampled Gaussian on ``[-radius, radius]``, renormalized to sum 1."""
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-(k * k) / (2.0 * sigma * sigma))
    g /= g.sum()
    # fold the residual into the center tap so the sum is 1 to the last ulp
    g[radius] += 1.0 - g.sum()
    return g


def _kernel_pair(spec: DoGSpec) -> tuple[np.ndarray, np.ndarray]:
    r = spec.radius
    return gaussian_kernel_1d(spec.sigma_c, r), gaussian_kernel_1d(spec.sigma_s, r)


def dog_kernel_2d(spec: DoGSpec) -> np.ndarray:
    """Square ``(2r+1)``-sided DoG matrix ``outer(g_c, g_c) - outer(g_s, g_s)``."""
    gc, gs = _kernel_pair(spec)
    return np.outer(gc, gc) - np.outer(gs, gs)


def _suppress_roundoff(out: np.ndarray, img: np.ndarray) -> np.ndarray:
    peak = float(np.max(np.abs(img)))
    if peak > 0:
        out[np.abs(out) <= ROUNDOFF_RTOL * peak] = 0.0
    return out


def _blur(img: np.ndarray, g: np.ndarray) -> np.ndarray:
    # scipy 'reflect' is the edge-inclusive mirror (d c b a | a b c d)
    tmp = correlate1d(img, g, axis=1, mode="reflect")
    return correlate1d(tmp, g, axis=0, mode="reflect")


def dog_filter(img, spec: DoGSpec) -> np.ndarray:
    """Center-minus-surround response via two separable Gaussian passes."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"image must be a non-empty 2-D array, got shape {img.shape}")
    gc, gs = _kernel_pair(spec)
    out = _blur(img, gc) - _blur(img, gs)
    return as_image(_suppress_roundoff(out, img))


def dog_filter_direct(img, spec: DoGSpec) -> np.ndarray:
    """Reference implementation: explicit 2-D correlation with :func:`dog_kernel_2d`.

    O(n k^2); kept as an oracle for the separable path.
    """
    img = np.asarray(img, dtype=np.float64)
    kernel = dog_kernel_2d(spec)
    r = spec.radius
    padded = np.pad(img, r, mode="symmetric")
    h, w = img.shape
    out = np.zeros_like(img)
    for dy in range(2 * r + 1):
        for dx in range(2 * r + 1):
            out += kernel[dy, dx] * padded[dy : dy + h, dx : dx + w]
    return _suppress_roundoff(out, img)


@dataclass(frozen=True)
class EdgeMapStack:
    """Ordered ``(sigma_c, response)`` pairs, one per schedule value."""

    entries: tuple[tuple[float, np.ndarray], ...]
    surround_ratio: float = DEFAULT_SURROUND_RATIO
    window_ratio: float = DEFAULT_WINDOW_RATIO

    @property
    def scales(self) -> list[float]:
        return [s for s, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def edge_map(
    img,
    schedule: Iterable[float],
    s: float = DEFAULT_SURROUND_RATIO,
    h: float = DEFAULT_WINDOW_RATIO,
    jobs: int = 1,
) -> EdgeMapStack:
    """DoG-filter ``img`` independently at every scale in ``schedule``."""
    sigmas = check_schedule(list(schedule))
    specs = [DoGSpec(sig, s, h) for sig in sigmas]
    img = as_image(img)
    if jobs > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(lambda sp: dog_filter(img, sp), specs))
    else:
        outputs = [dog_filter(img, sp) for sp in specs]
    return EdgeMapStack(tuple(zip(sigmas, outputs)), s, h)
