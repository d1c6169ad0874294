"""Command-line entry point: ``collectibility <subcommand> ...``.

Exit codes: 0 on success (whatever the verdict), 2 for invalid input,
3 for a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import critical_purity, purity_floors
from .collect import OptimizerConfig, Verdict, collectibility_mixed_max, collectibility_pure_max
from .errors import CollectibilityError, NumericalError, ValidationError
from .pseudopure import (
    MeasurementAxis,
    read_click_csv,
    simulate_clicks,
    witness,
    witness_from_clicks,
    write_click_csv,
)
from .qcore import DensityMatrix, PureState, TensorShape, load_state
from .werner import thresholds_two_qubit


def _sig(x, digits):
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, float):
        return float(f"{x:.{digits}g}") if math.isfinite(x) else None
    return x


def _round_tree(obj, digits):
    if isinstance(obj, dict):
        return {k: _round_tree(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v, digits) for v in obj]
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    return _sig(obj, digits)


def _meta(args) -> dict:
    # output locations do not affect results, so they stay out of the echo
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output", "out_dir")}
    return {"version": __version__, "seed": getattr(args, "seed", 0), "flags": flags}


def _header_lines(args) -> list[str]:
    meta = _meta(args)
    return [f"collectibility {meta['version']} seed={meta['seed']}",
            "flags " + json.dumps(meta["flags"], sort_keys=True, default=str)]


def _emit_json(obj, args):
    text = json.dumps(_round_tree(obj, args.precision), indent=2, default=str) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_text(text, args):
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _cfg(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters,
                           objective_tol=args.tol, seed=args.seed)


def _basis_json(basis):
    return [np.stack([u.real, u.imag], axis=-1).tolist() for u in basis.locals]


def cmd_collect(args) -> int:
    state = load_state(args.state)
    if args.mode == "pure" and not isinstance(state, PureState):
        raise ValidationError("--pure needs a state file with 'amplitudes'")
    mode = args.mode or ("pure" if isinstance(state, PureState) else "mixed")
    if mode == "pure":
        rep = collectibility_pure_max(state, _cfg(args))
        bounds = {"general": rep.bound, "separable": rep.threshold}
        checked = "separable"
    else:
        rho = DensityMatrix.from_pure(state) if isinstance(state, PureState) else state
        rep = collectibility_mixed_max(rho, _cfg(args))
        bounds = {"purity": rep.bound, "ppt": rep.threshold}
        checked = "ppt" if rep.threshold is not None else None
    _emit_json({
        "meta": _meta(args),
        "mode": mode,
        "k": state.shape.k,
        "n": state.shape.n,
        "value": rep.value,
        "verdict": rep.verdict.value,
        "checked_against": checked,
        "threshold": rep.threshold,
        "bounds": bounds,
        "restarts_converged": rep.restarts_converged,
        "restarts": args.restarts,
        "basis": _basis_json(rep.basis),
    }, args)
    return 0


def crit_table_rows() -> list[dict]:
    rows = []
    for panel, shapes in (("K=2", [TensorShape(2, n) for n in (2, 3, 4)]),
                          ("N=2", [TensorShape(k, 2) for k in (2, 3, 4)])):
        for shape in shapes:
            p_min, p_ppt = purity_floors(shape)
            rows.append({"panel": panel, "K": shape.k, "N": shape.n,
                         "P_min": p_min, "P_PPT": p_ppt, "P_crit": critical_purity(shape)})
    return rows


def cmd_crit_table(args) -> int:
    lines = [f"# {h}" for h in _header_lines(args)]
    lines.append("panel,K,N,P_min,P_PPT,P_crit")
    d = args.decimals
    for r in crit_table_rows():
        lines.append(f"{r['panel']},{r['K']},{r['N']},{r['P_min']:.{d}f},{r['P_PPT']:.{d}f},{r['P_crit']:.{d}f}")
    _emit_text("\n".join(lines) + "\n", args)
    return 0


def cmd_werner_scan(args) -> int:
    if args.lambda_steps < 2:
        raise ValidationError("--lambda-steps must be >= 2")
    lines = [f"# {h}" for h in _header_lines(args)]
    lines.append("lambda,alpha_T,alpha_C")
    p = args.precision
    for lam in np.linspace(0.0, 1.0, args.lambda_steps):
        th = thresholds_two_qubit(float(lam))
        lines.append(f"{lam:.{p}g},{th.alpha_t:.{p}g},{th.alpha_c:.{p}g}")
    _emit_text("\n".join(lines) + "\n", args)
    return 0


def _axes(args):
    return MeasurementAxis(*args.axis), MeasurementAxis(*args.axis_prime)


def _load_two_qubit(path) -> DensityMatrix:
    state = load_state(path)
    return DensityMatrix.from_pure(state) if isinstance(state, PureState) else state


def _with_warnings(fn, *a):
    """Call ``fn`` and forward its warnings to stderr as plain lines."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = fn(*a)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return out


def cmd_witness(args) -> int:
    if args.clicks:
        recs = {}
        for path in args.clicks:
            with open(path) as fh:
                recs.update(read_click_csv(fh))
        if len(recs) != 2:
            raise ValidationError(f"need records for exactly two axes, got {sorted(recs)}")
        labels = sorted(recs) if set(recs) != {"n", "nprime"} else ["n", "nprime"]
        rep = _with_warnings(witness_from_clicks, recs[labels[0]], recs[labels[1]], args.sigmas)
        source = {"clicks": list(args.clicks), "axes": labels}
    elif args.state:
        n, nprime = _axes(args)
        rep = witness(_load_two_qubit(args.state), n, nprime)
        source = {"state": args.state}
    else:
        raise ValidationError("give a state file or --clicks")
    _emit_json({"meta": _meta(args), "source": source, **rep.to_dict()}, args)
    return 0


def cmd_simulate(args) -> int:
    if args.shots < 1:
        raise ValidationError("--shots must be >= 1")
    rho = _load_two_qubit(args.state)
    n, nprime = _axes(args)
    ss_n, ss_p = np.random.SeedSequence(args.seed).spawn(2)
    rec_n = simulate_clicks(rho, n, args.shots, ss_n, label="n")
    rec_p = simulate_clicks(rho, nprime, args.shots, ss_p, label="nprime")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rec in (rec_n, rec_p):
        with open(out_dir / f"clicks_{rec.axis}.csv", "w", newline="") as fh:
            write_click_csv([rec], fh, _header_lines(args))
    payload = {"meta": _meta(args), "records": [str(out_dir / "clicks_n.csv"), str(out_dir / "clicks_nprime.csv")]}
    try:
        payload.update(_with_warnings(witness_from_clicks, rec_n, rec_p, args.sigmas).to_dict())
    except ValidationError as exc:
        print(f"warning: {type(exc).__name__}: {exc}", file=sys.stderr)
        payload.update({"verdict": Verdict.INCONCLUSIVE.value, "warnings": [f"{type(exc).__name__}: {exc}"]})
    _emit_json(payload, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collectibility",
                                     description="Collectibility-based entanglement detection for multipartite states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("-o", "--output", help="write to this file instead of stdout")
        p.add_argument("--precision", type=int, default=6, help="significant digits (default 6)")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    def axis_flags(p):
        p.add_argument("--axis", nargs=2, type=float, default=[0.0, 0.0], metavar=("THETA", "PHI"),
                       help="first Alice axis (default z)")
        p.add_argument("--axis-prime", nargs=2, type=float, default=[math.pi / 2, 0.0], metavar=("THETA", "PHI"),
                       help="complementary Alice axis (default x)")
        p.add_argument("--sigmas", type=float, default=3.0, help="guard band in standard errors for click data")

    p = sub.add_parser("collect", help="maximal collectibility of a state file")
    p.add_argument("state")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--pure", dest="mode", action="store_const", const="pure")
    mode.add_argument("--mixed", dest="mode", action="store_const", const="mixed")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-10)
    common(p)
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("crit-table", help="minimal, PPT and critical purities")
    p.add_argument("--decimals", type=int, default=4)
    common(p)
    p.set_defaults(func=cmd_crit_table)

    p = sub.add_parser("werner-scan", help="two-qubit Werner thresholds over lambda")
    p.add_argument("--lambda-steps", type=int, default=101)
    common(p)
    p.set_defaults(func=cmd_werner_scan)

    p = sub.add_parser("witness", help="pseudopure witness from a state or click CSVs")
    p.add_argument("state", nargs="?")
    p.add_argument("--clicks", nargs="+", metavar="CSV")
    axis_flags(p)
    common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("simulate", help="simulate coincidence counts and evaluate the witness")
    p.add_argument("state")
    p.add_argument("--shots", type=int, default=1_000_000)
    p.add_argument("--out-dir", default=".")
    axis_flags(p)
    common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(exc, 3)
    except (ValidationError, OSError, ValueError, TypeError, KeyError) as exc:
        return _fail(exc, 2)
    except CollectibilityError as exc:
        return _fail(exc, 3)


def _fail(exc, code: int) -> int:
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return code
