"""Run configuration: JSON schema, validation and default resolution.

A config names one stimulus source, a scale schedule, the DoG ratios,
Hough parameters (optionally overridden on scale bands) and what to write.
``resolve_config`` materializes every default so the result, saved as
``run.json``, reproduces the run exactly when fed back in.
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from . import patterns
from .dogfilter import DEFAULT_SURROUND_RATIO, DEFAULT_WINDOW_RATIO, scale_schedule
from .houghtilt import HoughParams

OUT_DIR_ENV = "DOGILLUSION_OUT"

OUTPUT_KEYS = ("stimulus", "jetwhite", "binary", "overlay", "csv")

_HOUGH_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "theta_resolution": {"type": "number", "exclusiveMinimum": 0},
        "rho_resolution": {"type": "number", "exclusiveMinimum": 0},
        "num_peaks": {"type": "integer", "minimum": 0},
        "peak_threshold_fraction": {"type": "number", "minimum": 0, "maximum": 1},
        "peak_neighborhood": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 2,
            "maxItems": 2,
        },
        "fill_gap": {"type": "number", "minimum": 0},
        "min_length": {"type": "number", "exclusiveMinimum": 0},
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["stimulus", "scales"],
    "properties": {
        "stimulus": {
            "type": "object",
            "oneOf": [
                {
                    "additionalProperties": False,
                    "required": ["generator"],
                    "properties": {
                        "generator": {"enum": sorted(patterns.GENERATORS)},
                        "params": {"type": "object"},
                    },
                },
                {
                    "additionalProperties": False,
                    "required": ["image"],
                    "properties": {"image": {"type": "string", "minLength": 1}},
                },
            ],
        },
        "scales": {
            "type": "object",
            "additionalProperties": False,
            "required": ["start", "stop", "step"],
            "properties": {
                "start": {"type": "number", "exclusiveMinimum": 0},
                "stop": {"type": "number", "exclusiveMinimum": 0},
                "step": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "surround_ratio": {"type": "number", "exclusiveMinimum": 1},
        "window_ratio": {"type": "number", "minimum": 2},
        "hough": _HOUGH_SCHEMA,
        "hough_bands": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["start", "stop", "hough"],
                "properties": {
                    "start": {"type": "number"},
                    "stop": {"type": "number"},
                    "hough": _HOUGH_SCHEMA,
                },
            },
        },
        "output_dir": {"type": "string", "minLength": 1},
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "boolean"} for k in OUTPUT_KEYS},
        },
    },
}


class ConfigError(ValueError):
    """Invalid run configuration; ``path`` is the dotted JSON location."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path or '<root>'}: {message}")


@dataclass(frozen=True)
class HoughBand:
    start: float
    stop: float
    params: HoughParams


@dataclass(frozen=True)
class RunConfig:
    stimulus: dict
    scales: dict
    surround_ratio: float
    window_ratio: float
    hough: HoughParams
    hough_bands: tuple[HoughBand, ...]
    output_dir: Path
    outputs: dict

    @property
    def schedule(self) -> list[float]:
        s = self.scales
        return scale_schedule(s["start"], s["stop"], s["step"])

    def hough_for(self, sigma: float) -> HoughParams:
        """Params for one scale; the last matching band wins."""
        params = self.hough
        for band in self.hough_bands:
            if band.start - 1e-9 <= sigma <= band.stop + 1e-9:
                params = band.params
        return params

    def to_json(self) -> dict:
        return {
            "stimulus": self.stimulus,
            "scales": dict(self.scales),
            "surround_ratio": self.surround_ratio,
            "window_ratio": self.window_ratio,
            "hough": _hough_dict(self.hough),
            "hough_bands": [
                {"start": b.start, "stop": b.stop, "hough": _hough_dict(b.params)}
                for b in self.hough_bands
            ],
            "output_dir": str(self.output_dir),
            "outputs": dict(self.outputs),
        }


def _hough_dict(p: HoughParams) -> dict:
    d = dataclasses.asdict(p)
    d["peak_neighborhood"] = list(p.peak_neighborhood)
    return d


def _spec_dict(spec) -> dict:
    d = dataclasses.asdict(spec)
    if isinstance(spec, patterns.SpiralCafeWallSpec):
        d["ring_phase_step"] = spec.phase_step
    if isinstance(spec, patterns.BulgeSpec):
        d["dot_offsets"] = [list(o) for o in spec.dot_offsets]
    return d


def _hough(raw: dict, base: HoughParams, where: str) -> HoughParams:
    try:
        return dataclasses.replace(base, **raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(where, str(exc)) from None


def validate(raw: dict) -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        # oneOf failures hide the useful branch error; surface the deepest one
        while err.context:
            err = max(err.context, key=lambda e: len(e.absolute_path))
        raise ConfigError(".".join(str(p) for p in err.absolute_path), err.message)


def resolve_config(raw: dict, base_dir: Path | None = None, output_dir=None) -> RunConfig:
    """Validate ``raw`` and fill in every default.

    Relative image paths resolve against ``base_dir`` (the config file's
    directory).  ``output_dir`` (or ``$DOGILLUSION_OUT``) overrides the
    configured output directory.
    """
    validate(raw)
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()

    stim = raw["stimulus"]
    if "generator" in stim:
        try:
            spec = patterns.make_spec(stim["generator"], stim.get("params"))
        except patterns.SpecError as exc:
            raise ConfigError("stimulus.params", str(exc)) from None
        stimulus = {"generator": stim["generator"], "params": _spec_dict(spec)}
    else:
        img = Path(stim["image"])
        if not img.is_absolute():
            img = base_dir / img
        stimulus = {"image": str(img.resolve())}

    sc = raw["scales"]
    scales = {"start": float(sc["start"]), "stop": float(sc["stop"]), "step": float(sc["step"])}
    if scales["stop"] < scales["start"]:
        raise ConfigError("scales.stop", f"stop {scales['stop']} is below start {scales['start']}")
    if not math.isfinite(scales["stop"]):
        raise ConfigError("scales.stop", "must be finite")

    hough = _hough(raw.get("hough", {}), HoughParams(), "hough")
    bands = []
    for i, band in enumerate(raw.get("hough_bands", [])):
        if band["stop"] < band["start"]:
            raise ConfigError(f"hough_bands.{i}.stop", "stop is below start")
        params = _hough(band["hough"], hough, f"hough_bands.{i}.hough")
        bands.append(HoughBand(float(band["start"]), float(band["stop"]), params))

    out = output_dir or os.environ.get(OUT_DIR_ENV) or raw.get("output_dir") or "out"
    outputs = {k: True for k in OUTPUT_KEYS}
    outputs.update(raw.get("outputs", {}))

    return RunConfig(
        stimulus=stimulus,
        scales=scales,
        surround_ratio=float(raw.get("surround_ratio", DEFAULT_SURROUND_RATIO)),
        window_ratio=float(raw.get("window_ratio", DEFAULT_WINDOW_RATIO)),
        hough=hough,
        hough_bands=tuple(bands),
        output_dir=Path(out).resolve(),
        outputs=outputs,
    )


def bundled_configs() -> dict[str, Path]:
    root = resources.files("dogillusion") / "configs"
    return {Path(p.name).stem: Path(str(p)) for p in root.iterdir() if p.name.endswith(".json")}


def find_config(name_or_path) -> Path:
    """A config file path, or the name of a bundled config (``fig1_hermann``)."""
    path = Path(name_or_path)
    if path.is_file():
        return path
    bundled = bundled_configs()
    if path.stem in bundled:
        return bundled[path.stem]
    raise ConfigError("", f"no config file {str(name_or_path)!r} and no bundled config {path.stem!r}")


def load_config(name_or_path, output_dir=None) -> RunConfig:
    path = find_config(name_or_path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path}: invalid JSON ({exc})") from None
    return resolve_config(raw, base_dir=path.parent, output_dir=output_dir)
