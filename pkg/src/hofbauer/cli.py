"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .coding import (
    DEFAULT_WORD_CAP,
    cylinder_interval,
    enumerate_words,
    format_word,
    parse_word,
)
from .diagram import (
    build_truncation,
    check_irreducibility,
    from_json,
    map_residual,
    maximal_scc,
    periodic_points,
    scc_decompose,
    simple_cycles,
    to_json,
    verify_certificate,
)
from .ldp import ldp_report
from .maps import PiecewiseMonotoneMap, from_spec
from .numeric import CapExceeded, DomainError, scalar_to_str
from .spectral import gibbs_check, indicator, mme_on_truncation

HARD_CAPS = {"depth": 200, "len": DEFAULT_WORD_CAP, "pmax": 16, "trials": 10**7}


class UsageError(Exception):
    pass


def _load_map(arg: str) -> tuple[PiecewiseMonotoneMap, dict]:
    text = arg.strip()
    if not text.startswith("{"):
        path = Path(arg)
        if not path.exists():
            raise UsageError(f"map spec {arg} not found")
        text = path.read_text(encoding="utf-8")
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad map spec: {exc}") from exc
    return from_spec(spec), spec


def _cap(args, name: str, value: int) -> int:
    if value > HARD_CAPS[name] and not args.unsafe:
        raise CapExceeded(f"--{name} {value} exceeds {HARD_CAPS[name]}; pass --unsafe to override")
    return value


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return None
        return v
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def manifest(args, spec: dict | None, T: PiecewiseMonotoneMap | None, started: float, outputs=()) -> dict:
    spec_text = json.dumps(spec, sort_keys=True) if spec is not None else ""
    return {
        "tool": "hofbauer",
        "version": __version__,
        "command": args.command,
        "argv": args.argv,
        "map_spec_sha256": hashlib.sha256(spec_text.encode()).hexdigest() if spec is not None else None,
        "seed": getattr(args, "seed", None),
        "number_policy": None if T is None else {"mode": T.policy.mode, "prec": T.policy.prec, "tol": T.policy.tol},
        "outputs": list(outputs),
        "duration_s": round(time.perf_counter() - started, 6),
    }


def _emit(args, payload: dict, spec, T, started) -> None:
    outputs = [args.out] if getattr(args, "out", None) else []
    if getattr(args, "csv", None):
        outputs.append(args.csv)
    payload = dict(payload)
    payload["manifest"] = manifest(args, spec, T, started, outputs)
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _parse_observable(text: str, k: int):
    if text.startswith("sym="):
        return indicator(int(text[4:]))
    if text.startswith("values="):
        vals = [float(v) for v in text[7:].split(",")]
        if len(vals) != k:
            raise UsageError(f"--observable values needs {k} entries")
        return vals
    raise UsageError("--observable must be sym=J or values=v1,...,vk")


def _parse_ns(text: str) -> list[int]:
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        a, b, step = parts
        return list(range(a, b + 1, step))
    return [int(p) for p in text.split(",")]


def _model(args, T):
    depth = _cap(args, "depth", args.depth)
    D = build_truncation(T, depth, depth_cap=10**6)
    return D, mme_on_truncation(D)


# --- subcommands ------------------------------------------------------------------

def cmd_words(args, T, spec, started):
    n = args.len
    cap = HARD_CAPS["len"] if not args.unsafe else max(n, HARD_CAPS["len"])
    for w in enumerate_words(T, n, cap=cap):
        sys.stdout.write(format_word(w) + "\n")


def cmd_cylinder(args, T, spec, started):
    cyl = cylinder_interval(T, parse_word(args.word))
    payload = {
        "word": list(cyl.word),
        "lo": float(cyl.lo),
        "hi": float(cyl.hi),
        "lo_exact": scalar_to_str(cyl.lo),
        "hi_exact": scalar_to_str(cyl.hi),
        "empty": cyl.empty,
    }
    _emit(args, payload, spec, T, started)


def cmd_diagram(args, T, spec, started):
    D = build_truncation(T, _cap(args, "depth", args.depth), depth_cap=10**6)
    payload = to_json(D)
    payload["stable"] = D.stable
    payload["sccs"] = [
        {"vertices": list(c.vertices), "spectral_radius": c.spectral_radius, "complete": c.complete, "maximal": c.maximal}
        for c in scc_decompose(D)
    ]
    _emit(args, payload, spec, T, started)


def cmd_check_irreducible(args, T, spec, started):
    lo, hi = (float(v) if "/" not in v else v for v in args.interval.split(","))
    res = check_irreducibility(T, (T.policy.convert(_num(lo)), T.policy.convert(_num(hi))), args.tau_max)
    if hasattr(res, "tau"):
        payload = {
            "certified": True,
            "interval": [float(v) for v in res.interval],
            "L": [float(v) for v in res.L],
            "L_exact": [scalar_to_str(v) for v in res.L],
            "tau": res.tau,
            "chain": list(res.chain),
            "verified": verify_certificate(T, res),
        }
    else:
        payload = {"certified": False, "interval": [float(v) for v in res.interval],
                   "tau_max": res.tau_max, "max_width": float(res.max_width)}
    _emit(args, payload, spec, T, started)


def _num(v):
    from fractions import Fraction

    return Fraction(v) if isinstance(v, str) else Fraction(repr(v)) if isinstance(v, float) else v


def cmd_entropy(args, T, spec, started):
    D = build_truncation(T, _cap(args, "depth", args.depth), depth_cap=10**6)
    scc = maximal_scc(D)
    payload = {"h": math.log(scc.spectral_radius), "lambda": scc.spectral_radius,
               "scc_size": len(scc), "depth": args.depth, "vertices": len(D), "stable": D.stable}
    _emit(args, payload, spec, T, started)


def cmd_mme(args, T, spec, started):
    D, m = _model(args, T)
    payload = {"h": m.h, "lambda": m.lam, "period": m.period, "scc": list(m.scc),
               "symbols": m.symbols, "L": m.L, "R": m.R, "pi": m.pi, "P": m.P, "depth": args.depth}
    _emit(args, payload, spec, T, started)


def cmd_gibbs(args, T, spec, started):
    D, m = _model(args, T)
    F = None
    if args.F:
        F = [m.position(int(v)) for v in args.F.split(",")]
    rep = gibbs_check(m, F, args.nmax)
    payload = {"F": [m.scc[i] for i in rep.F], "K": rep.K, "L_sum": rep.L_sum, "R_sup": rep.R_sup,
               "min_LR": rep.min_LR, "n_max": rep.n_max, "h": rep.h, "depth": args.depth,
               "checked_upper": rep.checked_upper, "checked_lower": rep.checked_lower,
               "violations": [[kind, list(u), mass, bound] for kind, u, mass, bound in rep.violations]}
    _emit(args, payload, spec, T, started)


def cmd_periodic(args, T, spec, started):
    D = build_truncation(T, _cap(args, "depth", args.depth), depth_cap=10**6)
    pmax = _cap(args, "pmax", args.pmax)
    scc = maximal_scc(D).vertices
    rows = []
    for cyc in simple_cycles(D, pmax, subset=scc):
        pt = periodic_points(T, [D.vertices[i] for i in cyc])
        mr = map_residual(T, pt)
        rows.append({"cycle": cyc, "word": list(pt.word), "x": float(pt.x), "x_exact": scalar_to_str(pt.x),
                     "orbit": [float(y) for y in pt.orbit], "residual": float(pt.residual),
                     "map_residual": None if mr is None else float(mr)})
    _emit(args, {"depth": args.depth, "pmax": pmax, "cycles": rows}, spec, T, started)


def cmd_ldp(args, T, spec, started):
    if args.seed is None:
        raise UsageError("ldp requires --seed")
    trials = _cap(args, "trials", args.trials)
    D, m = _model(args, T)
    f = _parse_observable(args.observable, T.k)
    levels = [float(v) for v in args.levels.split(",")]
    rep = ldp_report(m, f, levels, _parse_ns(args.ns), trials, args.seed, jobs=args.jobs)
    rep["observable"] = args.observable
    rep["depth"] = args.depth
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "n", "p", "std_error", "hits", "censored"])
            for row in rep["rows"]:
                for n, p, se, c, z in zip(row["ns"], row["probabilities"], row["std_errors"], row["hits"], row["censored"]):
                    w.writerow([row["s"], n, repr(p), repr(se), c, int(z)])
    _emit(args, rep, spec, T, started)


def cmd_report(args, T, spec, started):
    D, m = _model(args, T)
    rep = gibbs_check(m, None, args.nmax)
    cycles = list(simple_cycles(D, min(args.pmax, HARD_CAPS["pmax"]), subset=m.scc))
    payload = {
        "depth": args.depth,
        "vertices": len(D),
        "stable": D.stable,
        "h": m.h,
        "lambda": m.lam,
        "period": m.period,
        "scc_size": m.size,
        "pi": m.pi,
        "gibbs": {"K": rep.K, "n_max": rep.n_max, "violations": len(rep.violations)},
        "simple_cycles": len(cycles),
        "caveats": [
            "irreducibility of a finite truncation exhibits but does not certify "
            "transitivity of the full diagram",
            "L, R and pi are truncation-level Perron data",
        ],
    }
    _emit(args, payload, spec, T, started)


COMMANDS = {
    "words": cmd_words,
    "cylinder": cmd_cylinder,
    "diagram": cmd_diagram,
    "check-irreducible": cmd_check_irreducible,
    "entropy": cmd_entropy,
    "mme": cmd_mme,
    "gibbs": cmd_gibbs,
    "periodic": cmd_periodic,
    "ldp": cmd_ldp,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hofbauer", description="Markov diagrams, MME and large deviations for interval maps")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--map", required=True, help="map-spec JSON file or inline JSON")
        sp.add_argument("--unsafe", action="store_true", help="lift hard caps")
        sp.add_argument("--jobs", type=int, default=1)
        return sp

    sp = add("words")
    sp.add_argument("--len", type=int, required=True)
    sp = add("cylinder")
    sp.add_argument("--word", required=True)
    sp.add_argument("--out")
    sp = add("diagram")
    sp.add_argument("--depth", type=int, default=20)
    sp.add_argument("--out")
    sp = add("check-irreducible")
    sp.add_argument("--interval", required=True)
    sp.add_argument("--tau-max", type=int, default=50)
    sp.add_argument("--out")
    sp = add("entropy")
    sp.add_argument("--depth", type=int, default=20)
    sp.add_argument("--out")
    sp = add("mme")
    sp.add_argument("--depth", type=int, default=20)
    sp.add_argument("--out")
    sp = add("gibbs")
    sp.add_argument("--depth", type=int, default=20)
    sp.add_argument("--nmax", type=int, default=12)
    sp.add_argument("--F", help="comma-separated vertex ids (default: whole SCC)")
    sp.add_argument("--out")
    sp = add("periodic")
    sp.add_argument("--depth", type=int, default=20)
    sp.add_argument("--pmax", type=int, default=8)
    sp.add_argument("--out")
    sp = add("ldp")
    sp.add_argument("--depth", type=int, default=20)
    sp.add_argument("--observable", default="sym=1")
    sp.add_argument("--levels", required=True)
    sp.add_argument("--ns", default="20:60:10")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.add_argument("--csv")
    sp = add("report")
    sp.add_argument("--depth", type=int, default=20)
    sp.add_argument("--nmax", type=int, default=10)
    sp.add_argument("--pmax", type=int, default=8)
    sp.add_argument("--out")
    return p


def dispatch(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    started = time.perf_counter()
    try:
        T, spec = _load_map(args.map)
        COMMANDS[args.command](args, T, spec, started)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(dispatch())


def load_diagram(path: str):
    """Read a diagram JSON written by ``diagram --out``."""
    return from_json(json.loads(Path(path).read_text(encoding="utf-8")))


if __name__ == "__main__":
    main()
