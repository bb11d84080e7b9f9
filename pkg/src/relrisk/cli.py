"""Command-line interface: ``relrisk <subcommand> [flags]``.

Exit codes: 0 success (including partial success of ``measure``), 1 bad
input, 2 the computation itself failed (undefined measure, transport out of
[0, 1], fit did not converge, direction contradiction).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path
from typing import Optional

from . import glmfit
from . import measures as M
from .errors import CollinearDesign, NotClosed, NotConverged, SeparationDetected, EffectMeasureError
from .measures import EffectScale, MeasureValue, RiskPair, TwoByTwoTable
from .switchmodel import (
    SWEEP_COLUMNS,
    SwitchModel,
    SwitchPatternType,
    exact_risks,
    observed_rows,
    observed_table,
    simulate_cohort,
    stability_sweep,
    stable_scale,
)

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 1, 2
DEFAULT_SCALES = "rr,sr,rd,or,rrr,rsr,switch,grrr"

PREVENTED_TEXT = "proportion prevented among those who would get the outcome if untreated"
HARMED_TEXT = "proportion harmed among those who would survive untreated"
BENEFIT_CAVEAT = "assumes monotonicity: treatment causes the outcome in no one"
HARM_CAVEAT = "assumes monotonicity: treatment prevents the outcome in no one"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# helpers


def _probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {v}")
    return v


def _load_table(text: str) -> TwoByTwoTable:
    try:
        raw = text if text.lstrip().startswith("{") else Path(text).read_text()
        return TwoByTwoTable.from_dict(json.loads(raw))
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise InputError(f"bad 2x2 table: {exc}") from None


def _risks_and_table(args) -> tuple[RiskPair, Optional[TwoByTwoTable]]:
    has_pair = args.p0 is not None or args.p1 is not None
    if args.table is not None and has_pair:
        raise InputError("give either --table or --p0/--p1, not both")
    if args.table is not None:
        table = _load_table(args.table)
        return M.estimate_risks(table), table
    if args.p0 is None or args.p1 is None:
        raise InputError("--p0 and --p1 are both required without --table")
    return RiskPair(args.p0, args.p1), None


def _fmt(x, precision: int) -> str:
    if x is None:
        return ""
    if isinstance(x, bool) or isinstance(x, str):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return f"{x:.{precision}f}"


def _csv_text(header, rows, precision: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v, precision) for v in row])
    return buf.getvalue()


def _emit(args, payload: dict, header, rows):
    if args.output == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = _csv_text(header, rows, args.precision)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(args, kind: str, message: str, **extra) -> int:
    print(f"{kind}: {message}", file=sys.stderr)
    payload = {"error": kind, "message": message, **extra}
    _emit(args, payload, ["error", "message", *extra], [[kind, message, *extra.values()]])
    return EXIT_COMPUTE


# ---------------------------------------------------------------------------
# subcommands


def cmd_measure(args) -> int:
    rp, table = _risks_and_table(args)
    try:
        scales = [EffectScale.from_name(s) for s in args.scales.split(",") if s.strip()]
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not scales:
        raise InputError("no scales requested")

    results = []
    for scale in scales:
        entry = {"scale": scale.value, "value": None, "selected": None, "ci_low": None, "ci_high": None, "reason": None}
        try:
            mv = M.compute(scale, rp)
            entry["value"] = float(mv.value)
            if mv.selected is not None:
                entry["selected"] = mv.selected.value
        except EffectMeasureError as exc:
            entry["reason"] = type(exc).__name__
            entry["message"] = str(exc)
            results.append(entry)
            continue
        ci_scale = scale
        if scale is EffectScale.SWITCH_SELECTED:
            ci_scale = mv.selected
        if table is not None and ci_scale in (EffectScale.RISK_RATIO, EffectScale.SURVIVAL_RATIO, EffectScale.ODDS_RATIO):
            try:
                ci = M.wald_ci(table, ci_scale, args.level)
                entry["ci_low"], entry["ci_high"] = ci.low, ci.high
            except EffectMeasureError as exc:
                entry["ci_reason"] = type(exc).__name__
        results.append(entry)

    payload = {
        "p0": rp.p0,
        "p1": rp.p1,
        "table": table.to_dict() if table else None,
        "level": args.level,
        "results": results,
    }
    header = ["scale", "value", "selected", "ci_low", "ci_high", "reason"]
    _emit(args, payload, header, [[r[k] for k in header] for r in results])
    if all(r["value"] is None for r in results):
        print("no requested scale is computable for these risks", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def cmd_transport(args) -> int:
    try:
        scale = EffectScale.from_name(args.scale)
        selected = None
        if scale is EffectScale.SWITCH_SELECTED:
            if args.selected is None:
                raise ValueError("--selected rr|sr is required with --scale switch")
            selected = EffectScale.from_name(args.selected)
        m = MeasureValue(scale, args.value, selected)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        p1 = M.apply_measure(args.p0, m)
    except NotClosed as exc:
        return _fail(args, "NotClosed", str(exc), implied=exc.implied)
    except EffectMeasureError as exc:
        return _fail(args, type(exc).__name__, str(exc))
    payload = {"p0": args.p0, "scale": scale.value, "value": args.value, "p1": p1}
    if selected is not None:
        payload["selected"] = selected.value
    _emit(args, payload, ["p0", "scale", "value", "p1"], [[args.p0, scale.value, args.value, p1]])
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.seed is None:
        raise InputError("--seed is required for simulate")
    if args.seed < 0:
        raise InputError("--seed must be nonnegative")
    if args.n <= 0:
        raise InputError("--n must be positive")
    if not 0 < args.treat_probability < 1:
        raise InputError("--treat-probability must lie strictly between 0 and 1")
    try:
        pattern = SwitchPatternType.from_name(args.pattern)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    model = SwitchModel(pattern, args.q, args.r)
    cohort = simulate_cohort(model, args.n, args.seed, workers=args.workers)
    assign_seed = args.seed if args.assign_seed is None else args.assign_seed
    table = observed_table(cohort, args.treat_probability, assign_seed)
    exact = exact_risks(model)
    est = M.estimate_risks(table) if table.n_treated and table.n_untreated else None

    if args.rows_out:
        a, y = observed_rows(cohort, args.treat_probability, assign_seed)
        with open(args.rows_out, "w", newline="") as fh:
            fh.write("a,y\n")
            fh.writelines(f"{ai},{yi}\n" for ai, yi in zip(a.tolist(), y.tolist()))

    payload = {
        "pattern": pattern.value,
        "q": args.q,
        "r": args.r,
        "n": args.n,
        "seed": args.seed,
        "assign_seed": assign_seed,
        "treat_probability": args.treat_probability,
        "counts": cohort.counts.as_dict(),
        "table": table.to_dict(),
        "exact": {"p0": exact.p0, "p1": exact.p1},
        "estimated": None if est is None else {"p0": est.p0, "p1": est.p1},
    }
    rows = [["counts", k, v] for k, v in cohort.counts.as_dict().items()]
    rows += [["table", k, v] for k, v in table.to_dict().items()]
    rows += [["exact", "p0", exact.p0], ["exact", "p1", exact.p1]]
    if est is not None:
        rows += [["estimated", "p0", est.p0], ["estimated", "p1", est.p1]]
    _emit(args, payload, ["section", "key", "value"], rows)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        pattern = SwitchPatternType.from_name(args.pattern)
        risks = [float(x) for x in args.r.split(",") if x.strip()]
        table = stability_sweep(pattern, args.q, risks)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload = {
        "pattern": pattern.value,
        "q": args.q,
        "stable_scale": stable_scale(pattern).label(),
        "rows": table.to_records(),
        "errors": [{"row": i, "column": c, "reason": msg} for (i, c), msg in sorted(table.errors.items())],
    }
    _emit(args, payload, list(SWEEP_COLUMNS), [[row[c] for c in SWEEP_COLUMNS] for row in table.rows])
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        data = glmfit.RegressionDataset.from_csv(args.csv)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read {args.csv}: {exc}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NotConverged)
        try:
            if args.link == "auto":
                result = glmfit.auto_link(data)
            else:
                result = glmfit.fit_log_binomial(data, "outcome" if args.link == "log" else "complement")
        except (SeparationDetected, CollinearDesign) as exc:
            return _fail(args, type(exc).__name__, str(exc))
    payload = {"link": args.link, **result.as_dict()}
    rows = [["reference_level", result.reference_level], ["effect_label", result.effect_label]]
    rows += [[f"coef:{k}", v] for k, v in payload["coefficients"].items()]
    rows += [["exposure_effect", result.exposure_effect], ["loglik", result.loglik],
             ["converged", result.converged], ["iterations", result.iterations],
             ["max_fitted_probability", result.max_fitted_probability]]
    _emit(args, payload, ["key", "value"], rows)
    if not result.converged or any(issubclass(w.category, NotConverged) for w in caught):
        print(f"NotConverged: stopped after {result.iterations} iterations", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def cmd_interpret(args) -> int:
    rp, _ = _risks_and_table(args)
    if args.direction == "benefit":
        if rp.p1 > rp.p0:
            return _fail(args, "DirectionContradiction",
                         f"risk rises under treatment (p0={rp.p0}, p1={rp.p1}); it cannot be read as a benefit")
        measure, text, caveat = M.relative_risk_reduction, PREVENTED_TEXT, BENEFIT_CAVEAT
    else:
        if rp.p1 < rp.p0:
            return _fail(args, "DirectionContradiction",
                         f"risk falls under treatment (p0={rp.p0}, p1={rp.p1}); it cannot be read as harm")
        measure, text, caveat = M.relative_survival_reduction, HARMED_TEXT, HARM_CAVEAT
    try:
        value = measure(rp).value
    except EffectMeasureError as exc:
        return _fail(args, type(exc).__name__, str(exc))
    payload = {"p0": rp.p0, "p1": rp.p1, "direction": args.direction, "value": value,
               "interpretation": text, "caveat": caveat}
    _emit(args, payload, ["direction", "value", "interpretation", "caveat"],
          [[args.direction, value, text, caveat]])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=["csv", "json"], default="json")
    common.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--precision", type=int, default=6, help="decimal places in CSV output")
    common.add_argument("--seed", type=int)

    parser = _Parser(prog="relrisk", description="Relative-risk effect measures, transport and response types.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def risk_inputs(p):
        p.add_argument("--table", help="2x2 counts as inline JSON or a path to a JSON file")
        p.add_argument("--p0", type=_probability)
        p.add_argument("--p1", type=_probability)

    p = sub.add_parser("measure", parents=[common], help="effect measures from risks or a 2x2 table")
    risk_inputs(p)
    p.add_argument("--scales", default=DEFAULT_SCALES)
    p.add_argument("--level", type=float, default=0.95)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("transport", parents=[common], help="apply a measure to a baseline risk")
    p.add_argument("--p0", type=_probability, required=True)
    p.add_argument("--scale", required=True)
    p.add_argument("--value", type=float, required=True)
    p.add_argument("--selected", help="rr or sr, for --scale switch")
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("simulate", parents=[common], help="simulate a switch-pattern cohort")
    p.add_argument("--pattern", required=True)
    p.add_argument("--q", type=_probability, required=True)
    p.add_argument("--r", type=_probability, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--treat-probability", type=float, default=0.5)
    p.add_argument("--assign-seed", type=int, help="seed for treatment assignment (default: --seed)")
    p.add_argument("--rows-out", metavar="PATH", help="also write individual rows as CSV (a,y)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="all measures across baseline risks")
    p.add_argument("--pattern", required=True)
    p.add_argument("--q", type=_probability, required=True)
    p.add_argument("--r", required=True, help="comma-separated baseline risks in [0, 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", parents=[common], help="log-binomial regression from a CSV")
    p.add_argument("csv")
    p.add_argument("--link", choices=["auto", "log", "complement"], default="auto")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("interpret", parents=[common], help="read 1-RR or 1-SR as a response-type share")
    risk_inputs(p)
    p.add_argument("--direction", choices=["benefit", "harm"], required=True)
    p.set_defaults(func=cmd_interpret)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EffectMeasureError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    raise SystemExit(main())
