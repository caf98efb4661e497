"""Hough line-segment extraction and per-scale tilt statistics.

Angle conventions (image frame, ``x`` right, ``y`` down):

* ``theta`` is the line-normal angle in [-90, 90); a line is the set of
  points with ``x cos(theta) + y sin(theta) = rho``, with ``(x, y)``
  measured from the image center.  Centering, a quarter-turn-symmetric
  trig table and symmetric rho rounding make the accumulator of
  ``np.rot90(img)`` an exact permutation of the original one.
* ``segment_angle`` is the direction of the segment itself,
  ``theta + 90`` folded into [-90, 90), i.e. ``atan(dy/dx)`` in pixel
  coordinates.  Horizontal is 0, vertical is -90.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .imagecore import binarize

CLASS_BASELINES = {
    "horizontal": 0.0,
    "vertical": 90.0,
    "diagonal+": 45.0,
    "diagonal-": -45.0,
}
CLASS_NAMES = tuple(CLASS_BASELINES)


@dataclass(frozen=True)
class HoughParams:
    theta_resolution: float = 1.0
    rho_resolution: float = 1.0
    num_peaks: int = 100
    peak_threshold_fraction: float = 0.5
    peak_neighborhood: tuple[int, int] = (11, 11)
    fill_gap: float = 5.0
    min_length: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "peak_neighborhood", tuple(int(v) for v in self.peak_neighborhood))
        if not (self.theta_resolution > 0 and self.rho_resolution > 0):
            raise ValueError("theta_resolution and rho_resolution must be > 0")
        if abs(180.0 / self.theta_resolution - round(180.0 / self.theta_resolution)) > 1e-9:
            raise ValueError("theta_resolution must divide 180 degrees")
        if self.fill_gap < 0:
            raise ValueError("fill_gap must be >= 0")
        if not self.min_length > 0:
            raise ValueError("min_length must be > 0")
        if self.num_peaks < 0:
            raise ValueError("num_peaks must be >= 0")
        if not 0.0 <= self.peak_threshold_fraction <= 1.0:
            raise ValueError("peak_threshold_fraction must lie in [0, 1]")
        if len(self.peak_neighborhood) != 2 or any(v < 1 or v % 2 == 0 for v in self.peak_neighborhood):
            raise ValueError("peak_neighborhood must be two odd positive sizes")

    @property
    def thetas(self) -> np.ndarray:
        """Theta bin centers in degrees."""
        n = int(round(180.0 / self.theta_resolution))
        return -90.0 + self.theta_resolution * np.arange(n)


@dataclass(frozen=True)
class Accumulator:
    votes: np.ndarray  # (n_rho, n_theta) int64
    thetas: np.ndarray  # degrees
    rhos: np.ndarray  # pixels
    origin: tuple[float, float]  # image-frame (x, y) of rho = 0


@dataclass(frozen=True)
class LineSegment:
    start: tuple[int, int]
    end: tuple[int, int]
    rho: float
    theta: float
    length: float
    segment_angle: float

    @property
    def orientation_class(self) -> str:
        return classify_angle(self.segment_angle)


def fold_angle(deg):
    """Map degrees into [-90, 90)."""
    return (np.asarray(deg, dtype=np.float64) + 90.0) % 180.0 - 90.0


def angle_deviation(angle, baseline):
    """Signed smallest difference ``angle - baseline`` modulo 180, in [-90, 90)."""
    return fold_angle(np.asarray(angle) - baseline)


def classify_angle(angle: float) -> str:
    """Nearest orientation baseline; ties go to the earlier of CLASS_NAMES."""
    best, best_d = None, math.inf
    for name in CLASS_NAMES:
        d = abs(float(angle_deviation(angle, CLASS_BASELINES[name])))
        if d < best_d - 1e-12:
            best, best_d = name, d
    return best


def _on_pixels(binary) -> tuple[np.ndarray, np.ndarray]:
    binary = np.asarray(binary)
    if binary.ndim != 2:
        raise ValueError(f"binary image must be 2-D, got shape {binary.shape}")
    if not np.isin(binary, (0, 1)).all():
        raise ValueError("hough_accumulate requires a binary image with values in {0, 1}")
    ys, xs = np.nonzero(binary)
    return xs.astype(np.float64), ys.astype(np.float64)


def _origin(shape) -> tuple[float, float]:
    h, w = shape
    return (w - 1) / 2.0, (h - 1) / 2.0


def trig_table(thetas) -> tuple[np.ndarray, np.ndarray]:
    """cos/sin of ``thetas`` (degrees) with exact quarter-turn symmetry.

    Angles in [-90, 0) reuse the values of ``theta + 90`` so that
    ``cos(t) == sin(t + 90)`` and ``sin(t) == -cos(t + 90)`` hold bitwise.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    base = np.where(thetas < 0, thetas + 90.0, thetas)
    rad = np.deg2rad(base)
    c, s = np.cos(rad), np.sin(rad)
    neg = thetas < 0
    return np.where(neg, s, c), np.where(neg, -c, s)


def _rho_bins(rho, res):
    """Nearest bin index, ties rounded away from zero (sign-symmetric)."""
    u = np.asarray(rho) / res
    return (np.sign(u) * np.floor(np.abs(u) + 0.5)).astype(np.int64)


def hough_accumulate(binary, params: HoughParams = HoughParams()) -> Accumulator:
    """Vote every ON pixel once per theta column into its nearest rho bin.

    Rho bins span ``[-D, D]`` with ``D = hypot(width, height)``.
    """
    xs, ys = _on_pixels(binary)
    shape = np.asarray(binary).shape
    ox, oy = _origin(shape)
    xs, ys = xs - ox, ys - oy
    thetas = params.thetas
    d = math.hypot(shape[1], shape[0])
    n_half = int(math.ceil(d / params.rho_resolution))
    rhos = params.rho_resolution * np.arange(-n_half, n_half + 1, dtype=np.float64)
    votes = np.zeros((len(rhos), len(thetas)), dtype=np.int64)
    cos, sin = trig_table(thetas)
    # columns are independent; each is filled by exactly one bincount
    for j in range(len(thetas)):
        bins = _rho_bins(xs * cos[j] + ys * sin[j], params.rho_resolution) + n_half
        votes[:, j] = np.bincount(bins, minlength=len(rhos))
    return Accumulator(votes, thetas, rhos, (ox, oy))


def _local_mass(votes: np.ndarray) -> np.ndarray:
    """3x3 vote sums, wrapping across theta = +-90 with rho mirrored."""
    padded = np.zeros((votes.shape[0] + 2, votes.shape[1] + 2), dtype=np.int64)
    padded[1:-1, 1:-1] = votes
    padded[1:-1, 0] = votes[::-1, -1]
    padded[1:-1, -1] = votes[::-1, 0]
    n_rho, n_theta = votes.shape
    return sum(padded[di : di + n_rho, dj : dj + n_theta] for di in range(3) for dj in range(3))


def hough_peaks(acc: Accumulator, params: HoughParams = HoughParams()) -> list[tuple[float, float]]:
    """Greedy non-maximum-suppressed peak picking.

    Picks the largest remaining bin, then removes a ``peak_neighborhood``
    window around it from consideration.  The window wraps across theta = +-90 with rho
    mirrored, since (rho, -90) and (-rho, 90) are the same line.  Equal
    votes are ranked by their 3x3 vote mass, which (unlike bin order) is
    preserved by quarter-turns of the image; remaining ties go to the lowest
    rho bin, then the lowest theta bin.
    """
    votes = acc.votes.astype(np.int64)
    if votes.size == 0:
        return []
    top = int(votes.max())
    if top <= 0:
        return []
    threshold = params.peak_threshold_fraction * top
    # rank key: votes first, local mass second; suppressed bins drop to -1
    mass = _local_mass(votes)
    work = votes * (int(mass.max()) + 1) + mass
    work[votes <= 0] = -1
    n_rho, n_theta = work.shape
    hr, ht = params.peak_neighborhood[0] // 2, params.peak_neighborhood[1] // 2
    peaks = []
    while len(peaks) < params.num_peaks:
        flat = int(np.argmax(work))
        i, j = divmod(flat, n_theta)
        if work[i, j] < 0 or votes[i, j] < threshold:
            break
        peaks.append((float(acc.rhos[i]), float(acc.thetas[j])))
        for dj in range(-ht, ht + 1):
            jj = j + dj
            ii_lo, ii_hi = i - hr, i + hr
            if 0 <= jj < n_theta:
                work[max(ii_lo, 0) : min(ii_hi, n_rho - 1) + 1, jj] = -1
            else:
                jj %= n_theta
                # mirrored rho rows for the wrapped column
                lo, hi = n_rho - 1 - ii_hi, n_rho - 1 - ii_lo
                work[max(lo, 0) : min(hi, n_rho - 1) + 1, jj] = -1
    return peaks


def _runs(order_xy: np.ndarray, fill_gap: float):
    """Split ordered pixel coordinates into runs.

    The gap between consecutive pixels is the number of missing raster
    steps, ``max(|dx|, |dy|) - 1``; runs break where it exceeds ``fill_gap``.
    """
    if len(order_xy) == 0:
        return []
    step = np.abs(np.diff(order_xy, axis=0)).max(axis=1) - 1
    cuts = np.nonzero(step > fill_gap)[0] + 1
    return np.split(order_xy, cuts)


def extract_segments(binary, peaks, params: HoughParams = HoughParams()) -> list[LineSegment]:
    """Turn Hough peaks into gap-merged pixel runs of at least ``min_length``.

    A pixel belongs to a peak's line when it falls in the same rho bin,
    i.e. lies within ``rho_resolution / 2`` of it.
    """
    xs, ys = _on_pixels(binary)
    segments = []
    if len(xs) == 0:
        return segments
    ox, oy = _origin(np.asarray(binary).shape)
    xc, yc = xs - ox, ys - oy
    res = params.rho_resolution
    for rho, theta in peaks:
        (c,), (s,) = trig_table([theta])
        target = int(_rho_bins(rho, res))
        near = np.nonzero(_rho_bins(xc * c + yc * s, res) == target)[0]
        if len(near) == 0:
            continue
        proj = -xc[near] * s + yc[near] * c
        order = near[np.lexsort((ys[near], xs[near], proj))]
        pts = np.stack([xs[order], ys[order]], axis=1)
        angle = float(fold_angle(theta + 90.0))
        for run in _runs(pts, params.fill_gap):
            (x0, y0), (x1, y1) = run[0], run[-1]
            length = math.hypot(x1 - x0, y1 - y0)
            if length >= params.min_length:
                segments.append(
                    LineSegment((int(x0), int(y0)), (int(x1), int(y1)), rho, theta, length, angle)
                )
    return segments


def detect_segments(binary, params: HoughParams = HoughParams()) -> list[LineSegment]:
    acc = hough_accumulate(binary, params)
    return extract_segments(binary, hough_peaks(acc, params), params)


@dataclass(frozen=True)
class ClassStats:
    count: int
    mean_deviation: float
    std_deviation: float


@dataclass(frozen=True)
class TiltStats:
    sigma_c: float
    count: int
    mean_angle: float | None = None
    std_angle: float | None = None
    classes: dict[str, ClassStats] = field(default_factory=dict)

    def class_count(self, name: str) -> int:
        stats = self.classes.get(name)
        return stats.count if stats else 0


def _tilt_for_scale(sigma_c: float, segments) -> TiltStats:
    if not segments:
        return TiltStats(sigma_c, 0)
    angles = np.array([sg.segment_angle for sg in segments], dtype=np.float64)
    classes = {}
    labels = [classify_angle(a) for a in angles]
    for name in CLASS_NAMES:
        members = angles[[lab == name for lab in labels]]
        if len(members):
            dev = angle_deviation(members, CLASS_BASELINES[name])
            classes[name] = ClassStats(len(members), float(dev.mean()), float(dev.std()))
    return TiltStats(sigma_c, len(angles), float(angles.mean()), float(angles.std()), classes)


def tilt_statistics(segments_per_scale: Mapping[float, list[LineSegment]]) -> list[TiltStats]:
    """Count, mean and population std of segment angles for every scale.

    The aggregate uses raw ``segment_angle``; class rows use the signed
    deviation from the class baseline (a 47 degree segment adds +2 to
    ``diagonal+``).  Scales appear in ascending order.
    """
    return [_tilt_for_scale(s, segments_per_scale[s]) for s in sorted(segments_per_scale)]


ParamsLike = HoughParams | Callable[[float], HoughParams]


def analyze_edge_map(stack, params: ParamsLike = HoughParams(), jobs: int = 1):
    """Binarize each stack entry at 0 and run the Hough pipeline per scale.

    ``params`` may be one :class:`HoughParams` or a callable mapping
    ``sigma_c`` to the params for that scale.
    """
    resolve = params if callable(params) else (lambda _s: params)

    def one(entry):
        sigma, response = entry
        return sigma, detect_segments(binarize(response, 0.0), resolve(sigma))

    entries = list(stack)
    if jobs > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, entries))
    else:
        results = [one(e) for e in entries]
    segments = dict(results)
    return segments, tilt_statistics(segments)
