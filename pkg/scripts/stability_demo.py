"""Print every measure across background risks for each switch pattern.

Shows which ratio stays fixed while the others drift.

    python3 scripts/stability_demo.py --q 0.3
"""

import argparse

from relrisk.switchmodel import SWEEP_COLUMNS, SwitchPatternType, stability_sweep, stable_scale


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--q", type=float, default=0.3, help="switch prevalence")
    parser.add_argument("--r", default="0,0.1,0.2,0.4,0.6,0.8,0.9", help="comma-separated background risks")
    args = parser.parse_args()
    risks = [float(x) for x in args.r.split(",")]

    for pattern in SwitchPatternType:
        table = stability_sweep(pattern, args.q, risks)
        print(f"\n{pattern.value}  (q={args.q}, stable: {stable_scale(pattern).label()})")
        print("  ".join(f"{c:>9}" for c in SWEEP_COLUMNS))
        for row in table.rows:
            print("  ".join(f"{'-':>9}" if row[c] is None else f"{row[c]:9.4f}" for c in SWEEP_COLUMNS))


if __name__ == "__main__":
    main()
