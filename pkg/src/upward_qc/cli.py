"""Command-line front end.

Usage::

    upward-qc classify --witness alternating --p 2 --eps 1
    upward-qc classify --csv seq.csv --p 1
    upward-qc density-curve --witness sin_integers --p 1 --eps 0.479 --grid 1000 10000
    upward-qc sine-density --p 1 --eps 0.4794255386 --n 1000000
    upward-qc suc-test --function arctan --p 2
    upward-qc witness decreasing_steps --n 100 --out seq.csv
    upward-qc pharma --out csv
    upward-qc perturb-demo

Exit status: 0 on success, 2 on invalid input, 1 on internal error.
Relative output paths are resolved against ``$UPWARD_QC_OUTPUT_DIR``
when it is set.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from pathlib import Path

from . import approx, classify, equidist, funcanalysis, seqcore, witnesses
from .errors import BadParams, SpecError

OUTPUT_DIR_ENV = "UPWARD_QC_OUTPUT_DIR"
SCHEMA_VERSION = 1


def _ledger(**extra) -> dict:
    out = {
        "floor": classify.DEFAULT_FLOOR,
        "grid": list(classify.DEFAULT_GRID),
        "eps": list(classify.DEFAULT_EPS),
        "flat_tolerance": seqcore.FLAT_TOLERANCE,
        "marginal_cut": approx.DEFAULT_MARGINAL_CUT,
        "comparison": "closed (>=)",
        "density": "|{k <= N : violation at k}| / N, index base 1",
    }
    out.update(extra)
    return out


def _resolve(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(text: str, output: str | None) -> None:
    if output:
        path = _resolve(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, output: str | None) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", output)


def _parse_params(items) -> dict:
    params = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise BadParams(f"--param expects key=value, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise BadParams(f"--param {key}: not a number: {value!r}") from None
    return params


def _source(args):
    if args.csv:
        return seqcore.read_sequence_csv(args.csv), {"csv": str(args.csv)}
    if not args.witness:
        raise BadParams("give --witness NAME or --csv PATH")
    params = _parse_params(args.param)
    if args.witness == "n_plus_p":
        params.setdefault("p", args.p)
    spec = witnesses.make_builtin(args.witness, **params)
    return spec, {"witness": args.witness, "params": params}


def _grid(args, spec, p):
    if args.grid:
        return [int(n) for n in args.grid]
    n_terms = args.n if args.n else spec.length
    if n_terms is None:
        return list(classify.DEFAULT_GRID)
    top = n_terms - p
    grid = sorted({n for n in (top // 100, top // 10, top) if n > p})
    if not grid:
        raise BadParams(f"{n_terms} terms are too few for step p={p}")
    return grid


def _add_source_args(sp):
    src = sp.add_argument_group("sequence source")
    src.add_argument("--witness", help="catalog sequence name")
    src.add_argument("--param", action="append", metavar="KEY=VALUE", help="catalog parameter")
    src.add_argument("--csv", help="sampled sequence file with header n,x")
    sp.add_argument("--p", type=int, default=1, help="step (default 1)")
    sp.add_argument("--grid", type=int, nargs="+", help="prefix lengths")
    sp.add_argument("--n", type=int, help="number of terms; grid becomes (M/100, M/10, M) with M = n - p")
    sp.add_argument("--output", help="write to this file instead of stdout")


def cmd_classify(args) -> int:
    spec, source = _source(args)
    # the report also classifies at step 1; size the grid for the larger step
    grid = _grid(args, spec, max(args.p, 1))
    eps = args.eps or list(classify.DEFAULT_EPS)
    report = classify.classify_report(spec, args.p, eps, grid, args.floor)
    main = report.verdicts[classify.SeqClass.UPWARD_P]
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "classify",
            "config": _ledger(floor=args.floor, grid=list(report.grid), eps=list(report.eps)),
            "source": source,
            "class": classify.SeqClass.UPWARD_P.value,
            "status": main.status.value,
            "verdict": main.to_dict(),
            "report": report.to_dict(),
        },
        args.output,
    )
    return 0


def cmd_density_curve(args) -> int:
    spec, source = _source(args)
    grid = _grid(args, spec, args.p)
    mode = seqcore.Mode(args.mode)
    curve = seqcore.density_curve(spec, args.p, args.eps, grid, mode)
    if args.violations_out:
        v = seqcore.violation_set(spec, seqcore.StepParams(args.p, args.eps, grid[-1]), mode)
        v.to_csv(_resolve(args.violations_out))
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "density-curve",
            "config": _ledger(grid=list(grid), eps=[args.eps]),
            "source": source,
            "p": args.p,
            "eps": args.eps,
            "mode": mode.value,
            **curve.to_dict(),
        },
        args.output,
    )
    return 0


def cmd_sine_density(args) -> int:
    empirical = equidist.sine_upward_density(args.p, args.alpha, args.eps, args.n)
    pred = equidist.arc_density_prediction(args.p, args.alpha, args.eps)
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "sine-density",
            "config": _ledger(),
            "p": args.p,
            "alpha": args.alpha,
            "eps": args.eps,
            "N": args.n,
            "s_p": pred.s_p,
            "r": pred.r,
            "empirical": empirical,
            "predicted": pred.predicted_density,
            "gap": abs(empirical - pred.predicted_density),
        },
        args.output,
    )
    return 0


def _function(args) -> funcanalysis.FunctionSpec:
    if args.function_json:
        text = args.function_json
        if not text.lstrip().startswith("{"):
            text = Path(text).read_text()
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadParams(f"invalid function JSON: {exc}") from None
        return funcanalysis.function_from_dict(obj)
    cat = funcanalysis.catalog()
    if args.function not in cat:
        raise BadParams(f"unknown function {args.function!r}; choose from {sorted(cat)}")
    return cat[args.function]


def cmd_suc_test(args) -> int:
    f = _function(args)
    grid = args.grid or list(classify.DEFAULT_GRID)
    eps = args.eps or list(classify.DEFAULT_EPS)
    report = funcanalysis.suc_evidence(f, args.p, args.suite, eps, grid, args.floor)
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "suc-test",
            "config": _ledger(floor=args.floor, grid=list(grid), eps=list(eps)),
            **report.to_dict(),
        },
        args.output,
    )
    return 0


def cmd_witness(args) -> int:
    spec = witnesses.make_builtin(args.name, **_parse_params(args.param))
    if args.n < 1:
        raise BadParams("--n must be positive")
    if args.out:
        path = _resolve(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        seqcore.write_sequence_csv(spec, args.n, path)
    else:
        buf = io.StringIO()
        buf.write(f"# schema_version: {seqcore.CSV_SCHEMA_VERSION}\nn,x\n")
        for k, v in enumerate(spec.values(args.n).tolist(), start=1):
            buf.write(f"{k},{v!r}\n")
        sys.stdout.write(buf.getvalue())
    return 0


def pharma_table(args) -> approx.SafetyTable:
    f = funcanalysis.polynomial([0.0, 4.0, -4.0])
    return approx.safety_table(f, args.degrees, args.eps, approx.SamplingGrid(args.grid_n), args.marginal_cut)


def cmd_pharma(args) -> int:
    table = pharma_table(args)
    config = _ledger(marginal_cut=args.marginal_cut, grid_n=args.grid_n, eps=[args.eps], function="4t(1-t)")
    if args.out == "json":
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "pharma",
                "config": config,
                "epsilon": table.epsilon,
                "rows": [r.to_dict() for r in table.rows],
            },
            args.output,
        )
        return 0
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    for key, value in config.items():
        buf.write(f"# {key}: {value}\n")
    buf.write("n,max_undershoot,P,sup_error,status\n")
    for r in table.rows:
        buf.write(f"{r.n},{r.max_undershoot:.4f},{r.P:.3f},{r.sup_error:.4f},{r.status.value}\n")
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_perturb_demo(args) -> int:
    cat = funcanalysis.catalog()
    if args.function not in cat:
        raise BadParams(f"unknown function {args.function!r}")
    params = funcanalysis.PerturbationParams(args.eps_prime, args.alpha, args.p)
    g = funcanalysis.perturb_function(cat[args.function], params)
    empirical = funcanalysis.perturbation_density(g, args.n)
    pred = equidist.arc_density_prediction(args.p, args.alpha, params.c / params.eps_prime)
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "perturb-demo",
            "config": _ledger(),
            "function": args.function,
            "eps_prime": args.eps_prime,
            "alpha": args.alpha,
            "p": args.p,
            "N": args.n,
            "s_p_alpha": params.s_p_alpha,
            "c": params.c,
            "empirical": empirical,
            "predicted": pred.predicted_density,
            "gap": abs(empirical - pred.predicted_density),
        },
        args.output,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="upward-qc", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify", help="verdicts for a sequence")
    _add_source_args(sp)
    sp.add_argument("--eps", type=float, nargs="+", help="thresholds (default 0.1 0.5 1.0)")
    sp.add_argument("--floor", type=float, default=classify.DEFAULT_FLOOR)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("density-curve", help="prefix violation densities")
    _add_source_args(sp)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--mode", choices=[m.value for m in seqcore.Mode], default="upward")
    sp.add_argument("--violations-out", help="CSV (k,d_k) of the violation set at the largest N")
    sp.set_defaults(func=cmd_density_curve)

    sp = sub.add_parser("sine-density", help="empirical vs predicted sine violation density")
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--eps", type=float, default=math.sin(0.5))
    sp.add_argument("--n", type=int, default=1_000_000)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_sine_density)

    sp = sub.add_parser("suc-test", help="SUC_p membership evidence for a function")
    sp.add_argument("--function", default="arctan", help="catalog function name")
    sp.add_argument("--function-json", help="function spec as JSON text or file path")
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--suite", nargs="+", help="witness names (default suite if omitted)")
    sp.add_argument("--eps", type=float, nargs="+")
    sp.add_argument("--grid", type=int, nargs="+")
    sp.add_argument("--floor", type=float, default=classify.DEFAULT_FLOOR)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_suc_test)

    sp = sub.add_parser("witness", help="emit a catalog sequence as CSV (n,x)")
    sp.add_argument("name", choices=seqcore.builtin_names())
    sp.add_argument("--param", action="append", metavar="KEY=VALUE")
    sp.add_argument("--n", type=int, default=100)
    sp.add_argument("--out", help="CSV path (stdout if omitted)")
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("pharma", help="Bernstein safety table for f(t) = 4t(1-t)")
    sp.add_argument("--degrees", type=int, nargs="+", default=list(approx.DEFAULT_DEGREES))
    sp.add_argument("--eps", type=float, default=approx.DEFAULT_EPSILON)
    sp.add_argument("--grid-n", type=int, default=approx.DEFAULT_GRID_N)
    sp.add_argument("--marginal-cut", type=float, default=approx.DEFAULT_MARGINAL_CUT)
    sp.add_argument("--out", choices=["csv", "json"], default="csv", help="output format")
    sp.add_argument("--output", help="file path (stdout if omitted)")
    sp.set_defaults(func=cmd_pharma)

    sp = sub.add_parser("perturb-demo", help="density of the sine-perturbed function along x_k = k")
    sp.add_argument("--function", default="arctan")
    sp.add_argument("--eps-prime", type=float, default=0.1)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--n", type=int, default=1_000_000)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_perturb_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, OSError) as exc:
        print(f"upward-qc: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"upward-qc: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
