"""Hard-edged raster generators for the illusion stimuli.

All generators return images in [0, 1] (0 = black) whose values are drawn
only from the luminances declared in their spec.  Coordinates are pixel
centers, ``x`` rightward and ``y`` downward.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .imagecore import as_image

BLACK = 0.0
WHITE = 1.0


class SpecError(ValueError):
    """A stimulus spec violates its invariants."""


def _check_luminance(name, value):
    if not 0.0 <= value <= 1.0:
        raise SpecError(f"{name} must lie in [0, 1], got {value}")


def _grid(width, height):
    ys, xs = np.mgrid[0:height, 0:width]
    return xs.astype(np.float64), ys.astype(np.float64)


@dataclass(frozen=True)
class HermannSpec:
    canvas: int = 512
    bar_width: int = 16
    period: int = 64
    bar_luminance: float = BLACK
    field_luminance: float = WHITE

    def __post_init__(self):
        if not 0 < self.bar_width < self.period <= self.canvas:
            raise SpecError(
                f"need 0 < bar_width < period <= canvas, got "
                f"{self.bar_width}, {self.period}, {self.canvas}"
            )
        _check_luminance("bar_luminance", self.bar_luminance)
        _check_luminance("field_luminance", self.field_luminance)


def gen_hermann(spec: HermannSpec = HermannSpec()) -> np.ndarray:
    idx = np.arange(spec.canvas)
    on_bar = (idx % spec.period) < spec.bar_width
    bars = on_bar[:, None] | on_bar[None, :]
    return as_image(np.where(bars, spec.bar_luminance, spec.field_luminance))


@dataclass(frozen=True)
class ZollnerSpec:
    canvas: int = 540
    n_long_lines: int = 6
    long_line_angle: float = 45.0
    line_spacing: float = 85.0
    inducer_length: float = 80.0
    inducer_period: float = 34.0
    inducer_angle: float = 0.0
    stroke_width: float = 3.0

    def __post_init__(self):
        if self.n_long_lines < 2:
            raise SpecError(f"n_long_lines must be >= 2, got {self.n_long_lines}")
        if not self.inducer_period > self.stroke_width:
            raise SpecError("inducer_period must exceed stroke_width")
        if self.stroke_width <= 0 or self.line_spacing <= 0 or self.canvas <= 0:
            raise SpecError("canvas, line_spacing and stroke_width must be positive")
        if self.inducer_length < 0:
            raise SpecError("inducer_length must be >= 0")


def _stroke_mask(xs, ys, p0, p1, width):
    """Pixels whose center lies within ``width / 2`` of segment p0-p1."""
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    half = width / 2.0
    # restrict work to the segment's bounding box
    h, w = xs.shape
    c0 = max(int(math.floor(min(x0, x1) - half)), 0)
    c1 = min(int(math.ceil(max(x0, x1) + half)) + 1, w)
    r0 = max(int(math.floor(min(y0, y1) - half)), 0)
    r1 = min(int(math.ceil(max(y0, y1) + half)) + 1, h)
    mask = np.zeros(xs.shape, dtype=bool)
    if c0 >= c1 or r0 >= r1:
        return mask
    px = xs[r0:r1, c0:c1] - x0
    py = ys[r0:r1, c0:c1] - y0
    seg2 = dx * dx + dy * dy
    if seg2 == 0:
        t = np.zeros_like(px)
    else:
        t = np.clip((px * dx + py * dy) / seg2, 0.0, 1.0)
    ex = px - t * dx
    ey = py - t * dy
    mask[r0:r1, c0:c1] = ex * ex + ey * ey <= half * half
    return mask


def zollner_geometry(spec: ZollnerSpec):
    """Long-line and inducer segment endpoints, in drawing order.

    Returns ``(long_lines, inducers)``; each inducer entry is
    ``(line_index, (p0, p1))``.
    """
    c = (spec.canvas - 1) / 2.0
    a = math.radians(spec.long_line_angle)
    # direction along the line; image y points down, so a positive angle rises
    ux, uy = math.cos(a), -math.sin(a)
    nx, ny = -uy, ux
    reach = spec.canvas * math.sqrt(2.0)
    long_lines, inducers = [], []
    half_len = spec.inducer_length / 2.0
    for k in range(spec.n_long_lines):
        off = (k - (spec.n_long_lines - 1) / 2.0) * spec.line_spacing
        mx, my = c + off * nx, c + off * ny
        long_lines.append(((mx - reach * ux, my - reach * uy), (mx + reach * ux, my + reach * uy)))
        if half_len == 0:
            continue
        ia = math.radians(spec.inducer_angle + (90.0 if k % 2 else 0.0))
        vx, vy = math.cos(ia), -math.sin(ia)
        n_steps = int(reach // spec.inducer_period)
        for j in range(-n_steps, n_steps + 1):
            px, py = mx + j * spec.inducer_period * ux, my + j * spec.inducer_period * uy
            if not (-half_len <= px <= spec.canvas - 1 + half_len and -half_len <= py <= spec.canvas - 1 + half_len):
                continue
            inducers.append((k, ((px - half_len * vx, py - half_len * vy), (px + half_len * vx, py + half_len * vy))))
    return long_lines, inducers


def gen_zollner(spec: ZollnerSpec = ZollnerSpec()) -> np.ndarray:
    xs, ys = _grid(spec.canvas, spec.canvas)
    ink = np.zeros(xs.shape, dtype=bool)
    long_lines, inducers = zollner_geometry(spec)
    for p0, p1 in long_lines:
        ink |= _stroke_mask(xs, ys, p0, p1, spec.stroke_width)
    for _, (p0, p1) in inducers:
        ink |= _stroke_mask(xs, ys, p0, p1, spec.stroke_width)
    return as_image(np.where(ink, BLACK, WHITE))


@dataclass(frozen=True)
class CafeWallSpec:
    tile_size: int = 32
    mortar_width: int = 2
    rows: int = 9
    cols: int = 16
    phase_shift: int = 16
    mortar_luminance: float = 0.5

    def __post_init__(self):
        if self.tile_size <= 0 or self.rows <= 0 or self.cols <= 0:
            raise SpecError("tile_size, rows and cols must be positive")
        if not 0 <= self.mortar_width < self.tile_size:
            raise SpecError("need 0 <= mortar_width < tile_size")
        if not 0.0 < self.mortar_luminance < 1.0:
            raise SpecError("mortar_luminance must lie strictly inside (0, 1)")

    @property
    def shape(self) -> tuple[int, int]:
        """``(height, width)`` of the rendered wall."""
        return (
            self.rows * self.tile_size + (self.rows - 1) * self.mortar_width,
            self.cols * self.tile_size,
        )


def gen_cafewall(spec: CafeWallSpec = CafeWallSpec()) -> np.ndarray:
    """Tile rows with mortar strips between them.

    With ``phase_shift = 0`` the rows form a checkerboard; row ``r`` is then
    slid right by ``r * phase_shift``.  Half a tile gives the classic wall.
    """
    height, width = spec.shape
    pitch = spec.tile_size + spec.mortar_width
    y = np.arange(height)
    row = y // pitch
    in_mortar = (y % pitch) >= spec.tile_size
    x = np.arange(width)
    shift = (row * spec.phase_shift) % (2 * spec.tile_size)
    col = (x[None, :] - shift[:, None]) // spec.tile_size
    black = ((col + row[:, None]) % 2) == 0
    out = np.where(black, BLACK, WHITE)
    out[in_mortar, :] = spec.mortar_luminance
    return as_image(out)


@dataclass(frozen=True)
class SpiralCafeWallSpec:
    canvas: int = 875
    n_rings: int = 16
    inner_radius: float = 40.0
    ring_growth: float = 1.157
    tiles_per_ring: int = 40
    mortar_fraction: float = 0.2
    ring_phase_step: float | None = None
    mortar_luminance: float = 0.5

    def __post_init__(self):
        if self.n_rings < 1 or self.tiles_per_ring < 1:
            raise SpecError("n_rings and tiles_per_ring must be positive")
        if not self.inner_radius > 0:
            raise SpecError("inner_radius must be > 0")
        if not self.ring_growth > 1:
            raise SpecError("ring_growth must be > 1")
        if not 0 <= self.mortar_fraction < 1:
            raise SpecError("mortar_fraction must lie in [0, 1)")
        _check_luminance("mortar_luminance", self.mortar_luminance)
        if self.radii[-1] > self.canvas / 2:
            raise SpecError(
                f"outermost radius {self.radii[-1]:.1f} exceeds canvas/2 = {self.canvas / 2}"
            )

    @property
    def phase_step(self) -> float:
        """Per-ring angular tile offset; defaults to half a tile angle."""
        if self.ring_phase_step is None:
            return math.pi / self.tiles_per_ring
        return self.ring_phase_step

    @property
    def radii(self) -> np.ndarray:
        """Ring boundaries ``r_0 < r_1 < ... < r_n`` (n_rings + 1 values)."""
        return self.inner_radius * self.ring_growth ** np.arange(self.n_rings + 1)


def gen_spiral_cafewall(spec: SpiralCafeWallSpec = SpiralCafeWallSpec()) -> np.ndarray:
    """Concentric rings of alternating tiles with mortar circles between rings.

    The arrangement is strictly circular; neighboring rings are rotated by
    ``phase_step``, which is what makes the rings look like a spiral.
    """
    xs, ys = _grid(spec.canvas, spec.canvas)
    c = (spec.canvas - 1) / 2.0
    dx, dy = xs - c, ys - c
    r = np.hypot(dx, dy)
    theta = np.mod(np.arctan2(dy, dx), 2 * math.pi)
    radii = spec.radii
    ring = np.searchsorted(radii, r, side="right") - 1
    inside = (ring >= 0) & (ring < spec.n_rings)
    ring_c = np.clip(ring, 0, spec.n_rings - 1)

    tile = np.floor((theta + ring_c * spec.phase_step) * spec.tiles_per_ring / (2 * math.pi))
    black = (tile.astype(np.int64) % 2) == 0
    out = np.where(black, BLACK, WHITE)

    # mortar straddles each boundary shared by two rings
    thickness = np.diff(radii)
    half = spec.mortar_fraction * thickness / 2.0
    mortar = np.zeros(r.shape, dtype=bool)
    for i in range(1, spec.n_rings):
        mortar |= (r >= radii[i] - half[i - 1]) & (r < radii[i] + half[i])
    out[mortar] = spec.mortar_luminance
    out[~inside] = WHITE
    return as_image(out)


def _default_dot_offsets():
    return ((0.2, 0.2), (0.8, 0.8))


@dataclass(frozen=True)
class BulgeSpec:
    width: int = 574
    height: int = 572
    tile_size: int = 41
    dot_radius: float = 5.0
    dot_region_radius: float = 190.0
    dot_offsets: tuple[tuple[float, float], ...] = field(default_factory=_default_dot_offsets)
    mirror_offsets: bool = True

    def __post_init__(self):
        object.__setattr__(self, "dot_offsets", tuple(tuple(map(float, o)) for o in self.dot_offsets))
        if self.width <= 0 or self.height <= 0 or self.tile_size <= 0:
            raise SpecError("width, height and tile_size must be positive")
        if not 0 <= self.dot_radius < self.tile_size / 2:
            raise SpecError("need 0 <= dot_radius < tile_size / 2")
        if not 0 <= self.dot_region_radius <= min(self.width, self.height) / 2:
            raise SpecError("dot_region_radius must lie in [0, canvas / 2]")
        if any(len(o) != 2 for o in self.dot_offsets):
            raise SpecError("dot_offsets entries must be (dx, dy) pairs")


def bulge_dot_centers(spec: BulgeSpec):
    """``(x, y, tile_is_black)`` for every stamped dot.

    Offsets are tile fractions from the tile's top-left corner.  With
    ``mirror_offsets`` they are reflected for tiles right of / below the
    canvas center, giving the point-symmetric layout that drives the bulge.
    """
    cx, cy = (spec.width - 1) / 2.0, (spec.height - 1) / 2.0
    t = spec.tile_size
    centers = []
    for row in range(-(-spec.height // t)):
        for col in range(-(-spec.width // t)):
            tx, ty = col * t + (t - 1) / 2.0, row * t + (t - 1) / 2.0
            if math.hypot(tx - cx, ty - cy) > spec.dot_region_radius:
                continue
            is_black = (row + col) % 2 == 0
            for fx, fy in spec.dot_offsets:
                if spec.mirror_offsets:
                    if tx > cx:
                        fx = 1.0 - fx
                    if ty > cy:
                        fy = 1.0 - fy
                centers.append((col * t - 0.5 + fx * t, row * t - 0.5 + fy * t, is_black))
    return centers


def gen_bulge(spec: BulgeSpec = BulgeSpec()) -> np.ndarray:
    """Checkerboard with opposite-colored dots on the tiles near the center."""
    xs, ys = _grid(spec.width, spec.height)
    t = spec.tile_size
    black = ((xs // t + ys // t) % 2) == 0
    out = np.where(black, BLACK, WHITE)
    if spec.dot_radius > 0:
        r2 = spec.dot_radius * spec.dot_radius
        for x, y, tile_black in bulge_dot_centers(spec):
            c0, c1 = max(int(x - spec.dot_radius), 0), min(int(x + spec.dot_radius) + 2, spec.width)
            r0, r1 = max(int(y - spec.dot_radius), 0), min(int(y + spec.dot_radius) + 2, spec.height)
            if c0 >= c1 or r0 >= r1:
                continue
            sub = (xs[r0:r1, c0:c1] - x) ** 2 + (ys[r0:r1, c0:c1] - y) ** 2 <= r2
            # dots stay inside their own tile
            own = black[r0:r1, c0:c1] == tile_black
            out[r0:r1, c0:c1][sub & own] = WHITE if tile_black else BLACK
    return as_image(out)


GENERATORS = {
    "hermann": (HermannSpec, gen_hermann),
    "zollner": (ZollnerSpec, gen_zollner),
    "cafewall": (CafeWallSpec, gen_cafewall),
    "spiral": (SpiralCafeWallSpec, gen_spiral_cafewall),
    "bulge": (BulgeSpec, gen_bulge),
}


def make_spec(name: str, params: dict | None = None):
    """Build the spec dataclass for generator ``name`` from a plain mapping."""
    try:
        spec_cls, _ = GENERATORS[name]
    except KeyError:
        raise SpecError(f"unknown stimulus {name!r}; choose from {sorted(GENERATORS)}") from None
    params = dict(params or {})
    known = {f.name for f in fields(spec_cls)}
    unknown = set(params) - known
    if unknown:
        raise SpecError(f"unknown {name} parameter(s): {sorted(unknown)}")
    if "dot_offsets" in params:
        params["dot_offsets"] = tuple(tuple(o) for o in params["dot_offsets"])
    try:
        return spec_cls(**params)
    except TypeError as exc:
        raise SpecError(str(exc)) from exc


def generate(name: str, params: dict | None = None) -> np.ndarray:
    spec = make_spec(name, params)
    return GENERATORS[name][1](spec)
