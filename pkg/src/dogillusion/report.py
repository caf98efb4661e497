"""Overlay rendering and CSV emission for analyzed edge maps."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from PIL import Image as PILImage, ImageDraw

from .houghtilt import CLASS_NAMES, LineSegment, TiltStats

GREEN = (0, 255, 0)
YELLOW = (255, 255, 0)
RED = (255, 0, 0)
CROSS_HALF = 3

SEGMENT_FIELDS = ("scale", "x1", "y1", "x2", "y2", "theta", "rho", "length", "segment_angle", "class")
STATS_FIELDS = ("scale", "class", "count", "mean_angle", "std_angle")


def scale_tag(sigma: float) -> str:
    return f"s{sigma:.1f}"


def _num(v: float) -> str:
    # fixed precision keeps the CSVs byte-stable
    return f"{v:.4f}"


def render_overlay(binary, segments: list[LineSegment]) -> np.ndarray:
    """Green segments over the binary map; yellow cross at start, red at end."""
    gray = (np.asarray(binary) > 0).astype(np.uint8) * 255
    canvas = PILImage.fromarray(np.stack([gray] * 3, axis=2), mode="RGB")
    draw = ImageDraw.Draw(canvas)
    for seg in segments:
        draw.line([seg.start, seg.end], fill=GREEN, width=1)
    for seg in segments:
        for (x, y), color in ((seg.start, YELLOW), (seg.end, RED)):
            draw.line([(x - CROSS_HALF, y - CROSS_HALF), (x + CROSS_HALF, y + CROSS_HALF)], fill=color)
            draw.line([(x - CROSS_HALF, y + CROSS_HALF), (x + CROSS_HALF, y - CROSS_HALF)], fill=color)
    return np.asarray(canvas)


def segment_rows(segments_per_scale: dict[float, list[LineSegment]]):
    for sigma in sorted(segments_per_scale):
        for seg in segments_per_scale[sigma]:
            yield {
                "scale": f"{sigma:.1f}",
                "x1": seg.start[0],
                "y1": seg.start[1],
                "x2": seg.end[0],
                "y2": seg.end[1],
                "theta": _num(seg.theta),
                "rho": _num(seg.rho),
                "length": _num(seg.length),
                "segment_angle": _num(seg.segment_angle),
                "class": seg.orientation_class,
            }


def stats_rows(stats: list[TiltStats]):
    """One ``all`` row per scale, then one row per non-empty class."""
    for st in stats:
        yield {
            "scale": f"{st.sigma_c:.1f}",
            "class": "all",
            "count": st.count,
            "mean_angle": "" if st.mean_angle is None else _num(st.mean_angle),
            "std_angle": "" if st.std_angle is None else _num(st.std_angle),
        }
        for name in CLASS_NAMES:
            cs = st.classes.get(name)
            if cs is None:
                continue
            yield {
                "scale": f"{st.sigma_c:.1f}",
                "class": name,
                "count": cs.count,
                "mean_angle": _num(cs.mean_deviation),
                "std_angle": _num(cs.std_deviation),
            }


def write_csv(path, fieldnames, rows) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
