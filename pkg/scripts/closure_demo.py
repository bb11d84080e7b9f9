"""Transport a set of effect measures to a range of baseline risks.

RR and SR values learned in one population can imply impossible risks in
another; GRRR never does.

    python3 scripts/closure_demo.py
"""

import argparse

from relrisk import EffectScale, MeasureValue, NotClosed, UndefinedMeasure, apply_measure


def transport(p0, scale, value):
    try:
        return f"{apply_measure(p0, MeasureValue(scale, value)):.4f}"
    except NotClosed as exc:
        return f"!{exc.implied:.3f}"
    except UndefinedMeasure:
        return "undef"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rr", type=float, default=2.5)
    parser.add_argument("--sr", type=float, default=2.5)
    parser.add_argument("--grrr", type=float, default=-0.6)
    args = parser.parse_args()

    cols = [(EffectScale.RISK_RATIO, args.rr), (EffectScale.SURVIVAL_RATIO, args.sr), (EffectScale.GRRR, args.grrr)]
    print(f"{'p0':>6}" + "".join(f"{s.value + '=' + str(v):>14}" for s, v in cols))
    for p0 in (0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9, 1.0):
        print(f"{p0:6.2f}" + "".join(f"{transport(p0, s, v):>14}" for s, v in cols))
    print("\n'!x' marks a NotClosed result; x is the implied risk outside [0, 1].")


if __name__ == "__main__":
    main()
