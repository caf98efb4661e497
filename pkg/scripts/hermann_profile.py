"""DoG response at Hermann-grid intersections vs. street midpoints, per scale.

Bar centers of the default grid fall between pixels, so each site is the mean
of the 2x2 pixel block straddling it.  Interior sites only (the first bar
touches the image border).

    python3 scripts/hermann_profile.py [--scales 1 15 1]
"""
import argparse

import numpy as np

from dogillusion.dogfilter import DoGSpec, dog_filter, scale_schedule
from dogillusion.patterns import HermannSpec, gen_hermann


def sites(spec: HermannSpec):
    p, lo = spec.period, spec.bar_width // 2 - 1
    bars = [k * p + lo for k in range(1, spec.canvas // p)]
    half = p // 2
    inter = [(y, x) for y in bars for x in bars]
    streets = [(y, x + half) for y in bars for x in bars[:-1]] + [(y + half, x) for y in bars[:-1] for x in bars]
    return inter, streets


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scales", nargs=3, type=float, default=(1.0, 15.0, 1.0), metavar=("START", "STOP", "STEP"))
    args = parser.parse_args()
    spec = HermannSpec()
    img = gen_hermann(spec)
    inter, streets = sites(spec)
    print(f"{'sigma_c':>7} {'intersection':>13} {'street':>11} {'street-inter':>13}")
    for sigma in scale_schedule(*args.scales):
        resp = dog_filter(img, DoGSpec(sigma))
        mi = np.mean([resp[y : y + 2, x : x + 2].mean() for y, x in inter])
        ms = np.mean([resp[y : y + 2, x : x + 2].mean() for y, x in streets])
        print(f"{sigma:7.1f} {mi:13.4e} {ms:11.4e} {ms - mi:13.4e}")


if __name__ == "__main__":
    main()
