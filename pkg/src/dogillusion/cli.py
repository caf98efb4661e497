"""Command-line front end: generate -> filter -> analyze -> report.

Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import patterns
from .dogfilter import edge_map
from .houghtilt import HoughParams, analyze_edge_map
from .imagecore import ImageIOError, binarize, load_image, render_jetwhite, save_grayscale, save_rgb
from .report import (
    SEGMENT_FIELDS,
    STATS_FIELDS,
    render_overlay,
    scale_tag,
    segment_rows,
    stats_rows,
    write_csv,
)
from .runconfig import ConfigError, RunConfig, load_config, resolve_config

log = logging.getLogger("dogillusion")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class OutputSet:
    """Tracks files written in one command so a failure can remove them."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.written: list[Path] = []
        self._created_dir = False

    def path(self, name: str) -> Path:
        if not self.directory.exists():
            self.directory.mkdir(parents=True)
            self._created_dir = True
        p = self.directory / name
        self.written.append(p)
        return p

    def rollback(self) -> None:
        for p in self.written:
            p.unlink(missing_ok=True)
        if self._created_dir:
            try:
                self.directory.rmdir()
            except OSError:
                pass


def load_stimulus(config: RunConfig) -> np.ndarray:
    stim = config.stimulus
    if "image" in stim:
        return load_image(stim["image"])
    return patterns.generate(stim["generator"], stim["params"])


def run_generate(config: RunConfig, out: OutputSet, img=None) -> np.ndarray:
    img = load_stimulus(config) if img is None else img
    save_grayscale(img, out.path("stimulus.png"))
    print(f"stimulus: {img.shape[1]}x{img.shape[0]}")
    return img


def run_filter(config: RunConfig, out: OutputSet, img, jobs: int = 1):
    stack = edge_map(img, config.schedule, config.surround_ratio, config.window_ratio, jobs=jobs)
    for sigma, response in stack:
        tag = scale_tag(sigma)
        if config.outputs["jetwhite"]:
            save_rgb(render_jetwhite(response), out.path(f"edgemap_{tag}_jetwhite.png"))
        if config.outputs["binary"]:
            save_grayscale(binarize(response), out.path(f"edgemap_{tag}_binary.png"))
    print(f"edge map: {len(stack)} scale(s) {', '.join(f'{s:g}' for s in stack.scales)}")
    return stack


def run_analyze(config: RunConfig, out: OutputSet, stack, jobs: int = 1):
    segments, stats = analyze_edge_map(stack, config.hough_for, jobs=jobs)
    if config.outputs["overlay"]:
        for sigma, response in stack:
            rgb = render_overlay(binarize(response), segments[sigma])
            save_rgb(rgb, out.path(f"overlay_{scale_tag(sigma)}.png"))
    if config.outputs["csv"]:
        write_csv(out.path("segments.csv"), SEGMENT_FIELDS, segment_rows(segments))
        write_csv(out.path("tilt_stats.csv"), STATS_FIELDS, stats_rows(stats))
    for st in stats:
        mean = "-" if st.mean_angle is None else f"{st.mean_angle:.2f}"
        std = "-" if st.std_angle is None else f"{st.std_angle:.2f}"
        print(f"sigma_c={st.sigma_c:g}: {st.count} segments, mean {mean}, std {std}")
    return segments, stats


def run_pipeline(config: RunConfig, jobs: int = 1) -> None:
    out = OutputSet(config.output_dir)
    try:
        img = load_stimulus(config)
        if config.outputs["stimulus"]:
            run_generate(config, out, img)
        stack = run_filter(config, out, img, jobs)
        run_analyze(config, out, stack, jobs)
        with open(out.path("run.json"), "w") as fh:
            json.dump(config.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except BaseException:
        out.rollback()
        raise


# -- argument parsing -------------------------------------------------------


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _params_from_pairs(pairs) -> dict:
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError("stimulus.params", f"expected KEY=VALUE, got {pair!r}")
        params[key.replace("-", "_")] = _parse_value(value)
    return params


def _add_generator_flags(parser, spec_cls) -> None:
    for f in dataclasses.fields(spec_cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        flag = "--" + f.name.replace("_", "-")
        if isinstance(default, bool):
            parser.add_argument(flag, type=lambda v: v.lower() in ("1", "true", "yes"), default=None)
        elif isinstance(default, int):
            parser.add_argument(flag, type=int, default=None, help=f"default {default}")
        elif isinstance(default, float) or default is None:
            parser.add_argument(flag, type=float, default=None, help=f"default {default}")
        else:
            parser.add_argument(flag, type=json.loads, default=None, help=f"JSON, default {list(default)}")


def _add_source_args(parser) -> None:
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="run config JSON (or bundled config name)")
    src.add_argument("--stimulus", choices=sorted(patterns.GENERATORS), help="generator name")
    src.add_argument("--input", help="PNG or PGM stimulus image")
    parser.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter")
    parser.add_argument("--scales", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    parser.add_argument("--surround-ratio", type=float)
    parser.add_argument("--window-ratio", type=float)
    parser.add_argument("-o", "--out", help="output directory")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1)


def _add_hough_args(parser) -> None:
    g = parser.add_argument_group("hough")
    for f in dataclasses.fields(HoughParams):
        flag = "--" + f.name.replace("_", "-")
        if f.name == "peak_neighborhood":
            g.add_argument(flag, nargs=2, type=int, metavar=("RHO", "THETA"))
        else:
            g.add_argument(flag, type=int if isinstance(f.default, int) else float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dogillusion", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write stimulus.png for one generator")
    gen_sub = gen.add_subparsers(dest="stimulus", required=True, metavar="STIMULUS")
    for name, (spec_cls, _) in sorted(patterns.GENERATORS.items()):
        p = gen_sub.add_parser(name)
        _add_generator_flags(p, spec_cls)
        p.add_argument("-o", "--out", default=".", help="output directory")

    filt = sub.add_parser("filter", help="write jetwhite and binary edge maps per scale")
    _add_source_args(filt)
    filt.add_argument("--no-jetwhite", action="store_true")
    filt.add_argument("--no-binary", action="store_true")

    ana = sub.add_parser("analyze", help="Hough tilt analysis: overlays and CSVs")
    _add_source_args(ana)
    _add_hough_args(ana)
    ana.add_argument("--no-overlay", action="store_true")

    pipe = sub.add_parser("pipeline", help="run generate, filter and analyze from a config")
    pipe.add_argument("config", help="config JSON path or bundled name, e.g. fig3_spiral")
    pipe.add_argument("-o", "--out", help="output directory override")
    pipe.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    return parser


def _config_from_args(args) -> RunConfig:
    if args.config:
        config = load_config(args.config, output_dir=args.out)
        raw = config.to_json()
    else:
        if args.stimulus:
            stim = {"generator": args.stimulus, "params": _params_from_pairs(args.param)}
        else:
            if args.param:
                raise ConfigError("stimulus.params", "--param applies to generators only")
            stim = {"image": args.input}
        if args.scales is None:
            raise ConfigError("scales", "--scales START STOP STEP is required without --config")
        raw = {"stimulus": stim}
    if args.scales is not None:
        raw["scales"] = dict(zip(("start", "stop", "step"), args.scales))
    if args.surround_ratio is not None:
        raw["surround_ratio"] = args.surround_ratio
    if args.window_ratio is not None:
        raw["window_ratio"] = args.window_ratio
    hough = {}
    for f in dataclasses.fields(HoughParams):
        v = getattr(args, f.name, None)
        if v is not None:
            hough[f.name] = list(v) if isinstance(v, list) else v
    if hough:
        raw["hough"] = {**raw.get("hough", {}), **hough}
        for band in raw.get("hough_bands", []):
            band["hough"].update(hough)
    outputs = dict(raw.get("outputs", {}))
    for key in ("jetwhite", "binary", "overlay"):
        if getattr(args, f"no_{key}", False):
            outputs[key] = False
    raw["outputs"] = outputs
    return resolve_config(raw, base_dir=Path.cwd(), output_dir=args.out)


def _cmd_generate(args) -> None:
    spec_cls, _ = patterns.GENERATORS[args.stimulus]
    params = {}
    for f in dataclasses.fields(spec_cls):
        v = getattr(args, f.name)
        if v is not None:
            params[f.name] = v
    try:
        img = patterns.generate(args.stimulus, params)
    except patterns.SpecError as exc:
        raise ConfigError("stimulus.params", str(exc)) from None
    out = OutputSet(Path(args.out))
    try:
        save_grayscale(img, out.path("stimulus.png"))
    except BaseException:
        out.rollback()
        raise
    print(f"stimulus: {img.shape[1]}x{img.shape[0]} -> {out.directory / 'stimulus.png'}")


def _cmd_stage(args) -> None:
    config = _config_from_args(args)
    out = OutputSet(config.output_dir)
    try:
        img = load_stimulus(config)
        if args.command == "filter":
            run_filter(config, out, img, args.jobs)
        else:
            stack = edge_map(img, config.schedule, config.surround_ratio, config.window_ratio, jobs=args.jobs)
            run_analyze(config, out, stack, args.jobs)
    except BaseException:
        out.rollback()
        raise


def _cmd_pipeline(args) -> None:
    config = load_config(args.config, output_dir=args.out)
    run_pipeline(config, jobs=args.jobs)
    print(f"outputs in {config.output_dir}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    handlers = {"generate": _cmd_generate, "filter": _cmd_stage, "analyze": _cmd_stage, "pipeline": _cmd_pipeline}
    try:
        handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImageIOError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
