"""Command-line entry point: ``python -m dlshor <command> [flags]``.

Every command writes CSV or JSON to ``--out`` (default stdout). CSV output
starts with one ``# dlshor ...`` comment line holding the command, seed
and configuration; JSON output carries the same under a ``config`` key.
Nothing time- or host-dependent is written, so re-runs are byte-identical.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

from . import __version__
from .numtheory import Adder

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# output ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    from fractions import Fraction
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _render(config: dict, columns, rows, fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        doc = {"config": config}
        if extra:
            doc.update(extra)
        if columns is not None:
            doc["rows"] = [{c: r[c] for c in columns} for r in rows]
        return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write("# dlshor " + json.dumps(config, sort_keys=True) + "\n")
    if columns is None:  # single record
        rec = _jsonable(extra or {})
        columns = list(rec)
        rows = [rec]
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(_jsonable(r[c])) for c in columns) + "\n")
    return buf.getvalue()


def _emit(args, text: str):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)


def _config(args, **fields) -> dict:
    cfg = {"command": args.command, "version": __version__, "seed": getattr(args, "seed", None)}
    cfg.update(fields)
    return cfg


# argument helpers -----------------------------------------------------------------

def _adder(text):
    try:
        return Adder.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError("adder must be qadd or radd")


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _qrange(text):
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO:HI")
    if not 12 <= lo <= hi <= 90:
        raise argparse.ArgumentTypeError("range must satisfy 12 <= LO <= HI <= 90")
    return lo, hi


def _common(sp, fmt_default="csv", seed=True):
    sp.add_argument("--out", help="output path (default: stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default=fmt_default,
                    help=f"output format (default: {fmt_default})")
    if seed:
        sp.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")


def _cap(sp):
    sp.add_argument("--cap", type=_positive,
                    help="simulation qubit cap (default: $DLSHOR_QUBIT_CAP or 26)")


def _mode(sp):
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", help="exact outcome distribution (default)")
    g.add_argument("--shots", type=_positive, help="sample this many shots instead")


# commands -------------------------------------------------------------------------

def cmd_pairs(args):
    from .numtheory import classify_pair, enumerate_pairs, qubit_count
    cols = ("p", "q", "bits_p", "bits_q", "qubits", "safe_prime")
    rows = []
    for p, q in enumerate_pairs(args.budget, args.adder):
        c = classify_pair(p, q)
        rows.append({"p": p, "q": q, "bits_p": c.bits_p, "bits_q": c.bits_q,
                     "qubits": qubit_count(p, q, args.adder), "safe_prime": c.safe_prime})
    cfg = _config(args, budget=args.budget, adder=args.adder.value)
    return _render(cfg, cols, rows, args.format)


def cmd_solve(args):
    from .shor import layout, modal_outcome, sample_success_rate, success_from_table, outcome_table
    from .numtheory import make_instance
    from .sim import check_cap
    inst = make_instance(args.p, args.q, args.seed)
    lay = layout(args.p, args.q, args.adder)
    check_cap(lay.total)
    s_rec, _ = modal_outcome(inst, args.adder)
    if args.shots:
        prob = sample_success_rate(inst, args.adder, args.shots, args.seed)
        mode = "shots"
    else:
        prob = success_from_table(outcome_table(inst, args.adder), inst.q, inst.s)
        mode = "exact"
    rec = {"p": inst.p, "q": inst.q, "g": inst.g, "h": inst.h, "qubits": lay.total,
           "s_true": inst.s, "s_recovered": s_rec, "probability": prob,
           "mode": mode, "shots": args.shots or 0}
    cfg = _config(args, p=args.p, q=args.q, adder=args.adder.value, mode=mode, shots=args.shots or 0)
    return _render(cfg, None, None, args.format, rec)


def cmd_sweep(args):
    from .shor import SWEEP_COLUMNS, sweep
    mode = args.shots if args.shots else "exact"
    rows = sweep(args.budget, args.adder, mode, args.seed, args.jobs)
    cfg = _config(args, budget=args.budget, adder=args.adder.value,
                  mode="exact" if mode == "exact" else "shots", shots=args.shots or 0)
    return _render(cfg, SWEEP_COLUMNS, rows, args.format)


def cmd_metrics(args):
    from .circuit import metrics, optimize
    from .numtheory import make_instance
    from .shor import build_dlp_circuit
    circ = build_dlp_circuit(make_instance(args.p, args.q, args.seed), args.adder)
    before, after = metrics(circ), metrics(optimize(circ))
    rec = {"p": args.p, "q": args.q, "qubits": circ.n_qubits,
           "gates_before": before.gate_count, "gates_after": after.gate_count,
           "depth_before": before.depth, "depth_after": after.depth,
           "nonclifford_before": before.non_clifford_count,
           "nonclifford_after": after.non_clifford_count}
    cfg = _config(args, p=args.p, q=args.q, adder=args.adder.value)
    return _render(cfg, None, None, args.format, rec)


def cmd_dataset(args):
    from .estimate import ROW_COLUMNS, generate_dataset
    rows = generate_dataset(args.qubits, args.per_cell, args.seed, args.jobs)
    dicts = [{c: getattr(r, c) for c in ROW_COLUMNS} for r in rows]
    cfg = _config(args, qubits=list(args.qubits), per_cell=args.per_cell, adder="radd")
    return _render(cfg, ROW_COLUMNS, dicts, args.format)


def _read_dataset(path):
    from .estimate import read_rows
    if path.endswith(".json"):
        from .estimate import ResourceRow
        with open(path) as fh:
            return [ResourceRow(**r) for r in json.load(fh)["rows"]]
    with open(path) as fh:
        return read_rows(fh)


def cmd_fit(args):
    from .estimate import METRICS, cross_validate, fit
    rows = _read_dataset(args.data)
    chosen = [args.metric] if args.metric else list(METRICS)
    out = []
    for m in chosen:
        params = fit(rows, m)
        cv = cross_validate(rows, m, args.folds, args.seed)
        rec = {"metric": m, **params.as_dict(), "cv_mean": cv.mean, "cv_rmse": cv.rmse,
               "cv_ratio": cv.rmse / cv.mean}
        out.append(rec)
    cfg = _config(args, data=os.path.basename(args.data), rows=len(rows), folds=args.folds)
    if args.format == "json":
        params = {r["metric"]: {k: r[k] for k in "abcdef"} for r in out}
        cv = {r["metric"]: {k: r[k] for k in ("cv_mean", "cv_rmse", "cv_ratio")} for r in out}
        return _render(cfg, None, None, "json", {"params": params, "cv": cv})
    cols = ("metric", "a", "b", "c", "d", "e", "f", "cv_mean", "cv_rmse", "cv_ratio")
    return _render(cfg, cols, out, "csv")


def _params(args):
    from .estimate import METRICS, load_params
    table = load_params(args.params_file)
    if args.metric:
        if args.metric not in table:
            raise UsageError(f"metric {args.metric!r} not in parameter file")
        return {args.metric: table[args.metric]}
    return {m: table[m] for m in METRICS if m in table}


def _params_label(args):
    return os.path.basename(args.params_file) if args.params_file else "bundled"


def cmd_extrapolate(args):
    from .estimate import extrapolate
    rows = [{"metric": m, "bits_p": args.bits_p, "bits_q": args.bits_q,
             "value": float(extrapolate(p, args.bits_p, args.bits_q))}
            for m, p in _params(args).items()]
    cfg = _config(args, params=_params_label(args), bits_p=args.bits_p, bits_q=args.bits_q)
    return _render(cfg, ("metric", "bits_p", "bits_q", "value"), rows, args.format)


def cmd_equiv(args):
    from .estimate import extrapolate, safe_prime_equivalent_bits, schnorr_ratio
    rows = []
    for m, p in _params(args).items():
        target = float(extrapolate(p, args.bits_p, args.bits_q))
        rows.append({"metric": m, "bits_p": args.bits_p, "bits_q": args.bits_q, "target": target,
                     "safe_prime_bits": safe_prime_equivalent_bits(p, target)})
    extra = None
    cols = ("metric", "bits_p", "bits_q", "target", "safe_prime_bits")
    if args.chi is not None:
        if not 0 < args.chi <= 1:
            raise UsageError("--chi must lie in (0, 1]")
        ratio = schnorr_ratio(args.chi)
        for r in rows:
            r["chi"], r["ratio"] = args.chi, ratio
        cols += ("chi", "ratio")
    cfg = _config(args, params=_params_label(args), bits_p=args.bits_p, bits_q=args.bits_q,
                  chi=args.chi)
    return _render(cfg, cols, rows, args.format, extra)


def cmd_same_qubits(args):
    from .numtheory import same_qubits_target
    x, y = same_qubits_target(args.budget, args.adder)
    rec = {"budget": args.budget, "adder": args.adder.value, "bits_p": x, "bits_q": y,
           "bits_p_rounded": round(x), "bits_q_rounded": round(y)}
    cfg = _config(args, budget=args.budget, adder=args.adder.value)
    return _render(cfg, None, None, args.format, rec)


def cmd_timing(args):
    from fractions import Fraction
    from .timing import GRID_COLUMNS, HSQFT, RHO_GRID, TimingModel, grid_report, \
        min_k_hsqft, schedule_simulate, simulated_min_k
    L_range = range(1, args.max_L + 1)
    rows = grid_report(L_range, RHO_GRID, range(1, args.max_k + 1))
    if args.partial_block != "proportional":
        for r in rows:
            if r["scheme"] == HSQFT:
                r["simulated"] = schedule_simulate(TimingModel(r["L"], r["U"], r["M"], r["k"]),
                                                   HSQFT, args.partial_block)
    cfg = _config(args, max_L=args.max_L, max_k=args.max_k, partial_block=args.partial_block,
                  rho_grid=[str(r) for r in RHO_GRID])
    if args.min_k:
        cols = ("L", "rho", "min_k_theorem", "min_k_simulated")
        rows = [{"L": L, "rho": float(rho), "min_k_theorem": min_k_hsqft(L, rho),
                 "min_k_simulated": simulated_min_k(L, rho, args.partial_block)}
                for L in range(2, args.max_L + 1) for rho in RHO_GRID if rho < Fraction(1)]
        return _render(cfg, cols, rows, args.format)
    return _render(cfg, GRID_COLUMNS, rows, args.format)


# parser ---------------------------------------------------------------------------

_SCHEMAS = {
    "pairs": "CSV columns: p,q,bits_p,bits_q,qubits,safe_prime (one row per pair, sorted).",
    "solve": "Record fields: p,q,g,h,qubits,s_true,s_recovered,probability,mode,shots. "
             "s_recovered is the modal post-processing result; probability is the exact "
             "success probability (or the sampled rate with --shots).",
    "sweep": "CSV columns: p,q,bits_p,bits_q,g,h,s,probability,mode,shots,seed.",
    "metrics": "Record fields: p,q,qubits,gates_before,gates_after,depth_before,depth_after,"
               "nonclifford_before,nonclifford_after (standard circuit, optimizer applied).",
    "dataset": "CSV columns: p,q,bits_p,bits_q,qubits,gates_before,gates_after,depth_before,"
               "depth_after,nonclifford_before,nonclifford_after (R-ADD circuits).",
    "fit": "CSV columns: metric,a,b,c,d,e,f,cv_mean,cv_rmse,cv_ratio. JSON holds params and cv "
           "maps keyed by metric; the JSON form is accepted by --params-file.",
    "extrapolate": "CSV columns: metric,bits_p,bits_q,value.",
    "equiv": "CSV columns: metric,bits_p,bits_q,target,safe_prime_bits[,chi,ratio]. target is the "
             "model value at (--bits-p, --bits-q); safe_prime_bits solves f(x, x-1) = target.",
    "same-qubits": "Record fields: budget,adder,bits_p,bits_q,bits_p_rounded,bits_q_rounded.",
    "timing": "CSV columns: L,U,M,k,scheme,closed_form,simulated (M = 1, U = rho). With "
              "--min-k: L,rho,min_k_theorem,min_k_simulated.",
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dlshor", description="Shor DLP circuits, simulation and resource estimates.")
    ap.add_argument("--version", action="version", version=f"dlshor {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, help=help_, description=help_, epilog=_SCHEMAS[name],
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    sp = add("pairs", "list (p, q) pairs within a qubit budget")
    sp.add_argument("--budget", type=_positive, required=True, help="qubit budget")
    sp.add_argument("--adder", type=_adder, default=Adder.QADD, help="qadd or radd (default: qadd)")
    _common(sp, seed=False)

    sp = add("solve", "simulate one DLP instance")
    sp.add_argument("--p", type=int, required=True, help="prime modulus")
    sp.add_argument("--q", type=int, required=True, help="prime subgroup order dividing p-1")
    sp.add_argument("--adder", type=_adder, default=Adder.QADD, help="qadd or radd (default: qadd)")
    _mode(sp)
    _cap(sp)
    _common(sp, fmt_default="json")

    sp = add("sweep", "success probability for every pair within a budget")
    sp.add_argument("--budget", type=_positive, required=True, help="qubit budget")
    sp.add_argument("--adder", type=_adder, default=Adder.QADD, help="qadd or radd (default: qadd)")
    _mode(sp)
    _cap(sp)
    sp.add_argument("--jobs", type=_positive, default=1, help="worker processes (default: 1)")
    _common(sp)

    sp = add("metrics", "gate count, depth and non-Clifford count of one circuit")
    sp.add_argument("--p", type=int, required=True, help="prime modulus")
    sp.add_argument("--q", type=int, required=True, help="prime subgroup order")
    sp.add_argument("--adder", type=_adder, default=Adder.RADD, help="qadd or radd (default: radd)")
    _common(sp, fmt_default="json")

    sp = add("dataset", "generate the resource dataset")
    sp.add_argument("--qubits", type=_qrange, default=(12, 45), metavar="LO:HI",
                    help="qubit range (default: 12:45)")
    sp.add_argument("--per-cell", type=_positive, default=5, help="pairs per cell (default: 5)")
    sp.add_argument("--jobs", type=_positive, default=1, help="worker processes (default: 1)")
    _common(sp)

    sp = add("fit", "fit the six-parameter model and cross-validate")
    sp.add_argument("--data", required=True, help="dataset file written by the dataset command")
    sp.add_argument("--metric", help="one metric column (default: all six)")
    sp.add_argument("--folds", type=_positive, default=10, help="CV folds (default: 10)")
    _common(sp)

    for name, text in (("extrapolate", "evaluate fitted models at a bit-length pair"),
                       ("equiv", "safe-prime bit length matching a Schnorr group's cost")):
        sp = add(name, text)
        sp.add_argument("--params-file", help="fit JSON (default: bundled published parameters)")
        sp.add_argument("--metric", help="one metric (default: all in the file)")
        sp.add_argument("--bits-p", type=float, default=2048.0, help="bit length of p (default: 2048)")
        sp.add_argument("--bits-q", type=float, default=256.0, help="bit length of q (default: 256)")
        if name == "equiv":
            sp.add_argument("--chi", type=float, help="gate-count ratio for the cube-root rule")
        _common(sp, seed=False)

    sp = add("same-qubits", "bit lengths that maximise cost at a fixed qubit count")
    sp.add_argument("--budget", type=_positive, required=True, help="qubit budget")
    sp.add_argument("--adder", type=_adder, default=Adder.RADD, help="qadd or radd (default: radd)")
    _common(sp, seed=False)

    sp = add("timing", "closed-form vs simulated makespans")
    sp.add_argument("--max-L", type=_positive, default=50, help="largest L (default: 50)")
    sp.add_argument("--max-k", type=_positive, default=8, help="largest k (default: 8)")
    sp.add_argument("--partial-block", choices=("proportional", "whole"), default="proportional",
                    help="charge for a short final HSQFT block (default: proportional)")
    sp.add_argument("--min-k", action="store_true", help="report the HSQFT threshold instead")
    _common(sp, seed=False)
    return ap


_COMMANDS = {"pairs": cmd_pairs, "solve": cmd_solve, "sweep": cmd_sweep, "metrics": cmd_metrics,
             "dataset": cmd_dataset, "fit": cmd_fit, "extrapolate": cmd_extrapolate,
             "equiv": cmd_equiv, "same-qubits": cmd_same_qubits, "timing": cmd_timing}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    saved_cap = os.environ.get("DLSHOR_QUBIT_CAP")
    if getattr(args, "cap", None):
        # via the environment so --jobs workers see it too; restored below
        os.environ["DLSHOR_QUBIT_CAP"] = str(args.cap)
    try:
        text = _COMMANDS[args.command](args)
        _emit(args, text)
    except UsageError as exc:
        sys.stderr.write(f"dlshor {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        sys.stderr.write(f"dlshor {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_RUNTIME
    finally:
        if saved_cap is None:
            os.environ.pop("DLSHOR_QUBIT_CAP", None)
        else:
            os.environ["DLSHOR_QUBIT_CAP"] = saved_cap
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
