"""Orientation-class shares of detected segments across a scale sweep.

    python3 scripts/class_shares.py fig1_zollner
    python3 scripts/class_shares.py fig3_bulge
"""
import argparse

from dogillusion.cli import load_stimulus
from dogillusion.dogfilter import edge_map
from dogillusion.houghtilt import CLASS_NAMES, analyze_edge_map
from dogillusion.runconfig import load_config


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config", help="bundled config name or JSON path")
    args = parser.parse_args()
    config = load_config(args.config)
    stack = edge_map(load_stimulus(config), config.schedule, config.surround_ratio, config.window_ratio)
    _, stats = analyze_edge_map(stack, config.hough_for)
    print(f"{'sigma_c':>7} {'n':>5} " + " ".join(f"{c:>10}" for c in CLASS_NAMES))
    for st in stats:
        shares = [st.class_count(c) / st.count if st.count else 0.0 for c in CLASS_NAMES]
        print(f"{st.sigma_c:7.1f} {st.count:5d} " + " ".join(f"{s:10.2f}" for s in shares))


if __name__ == "__main__":
    main()
