"""
Command line front end.

Exit codes: 0 success, 1 a sentence decided false, 2 usage error, 3 a
computation error (a JSON error object goes to stderr).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


from . import bounds, compare
from .cohomology import DEFAULT_FACE_CAP, formula_poincare
from .errors import CohomQEError
from .formula import format_formula, load_formula
from .fop import apply_operator_spec, build_F_omega, decide_sentence, omega_string, parse_omega
from .joinctor import build_join_formula, join_size_stats, params_for
from .motivic import (
    DEFAULT_BUDGET,
    DEFAULT_PIECE_CAP,
    class_from_counts,
    class_to_Q,
    count_points,
    formula_to_pieces,
    pieces_class,
)
from .polyring import IntPoly, pseudo


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    mode: str = "text"
    piece_cap: int = DEFAULT_PIECE_CAP
    face_cap: int = DEFAULT_FACE_CAP
    budget: int = DEFAULT_BUDGET
    primes: tuple[int, ...] = ()
    trace: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.piece_cap <= 0 or self.face_cap <= 0 or self.budget <= 0:
            raise UsageError("--piece-cap, --face-cap and --budget must be positive")
        if self.threads <= 0:
            raise UsageError("--threads must be positive")
        if len(set(self.primes)) != len(self.primes):
            raise UsageError("--primes must be pairwise distinct")
        if not self.primes:
            return
        from sympy import isprime   # deferred: sympy is slow to import
        bad = [q for q in self.primes if not isprime(q)]
        if bad:
            raise UsageError(f"--primes contains non-primes: {bad}")


# ---------------------------------------------------------------------------
# serialization


def plain(obj):
    """JSON-ready copy: integers and rationals become decimal strings."""
    if isinstance(obj, IntPoly):
        return {"poly": obj.to_json()}
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, Fraction)):
        return str(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return plain(obj.to_dict())
    return str(obj)


def emit_report(result, mode: str = "json") -> bytes:
    """Deterministic bytes for ``result`` in ``json``, ``csv`` or ``text`` mode."""
    if mode == "json":
        return (json.dumps(plain(result), sort_keys=True, ensure_ascii=False) + "\n").encode()
    if mode == "csv":
        rows = result if isinstance(result, list) else [result]
        rows = [plain(r) for r in rows]
        cols = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v)
                        for k, v in r.items()})
        return buf.getvalue().encode()
    if isinstance(result, str):
        return (result + "\n").encode()
    return (_text(result) + "\n").encode()


def _text(result) -> str:
    if isinstance(result, dict):
        return "\n".join(f"{k}: {_text(v)}" for k, v in result.items())
    if isinstance(result, list):
        return ", ".join(_text(v) for v in result)
    if isinstance(result, bool):
        return "true" if result else "false"
    return str(result)


# ---------------------------------------------------------------------------
# helpers


def _load(path: str):
    if not os.path.exists(path):
        raise UsageError(f"--formula: no such file {path!r}")
    return load_formula(path)


def _join_q(psi, cfg: RunConfig, via: str) -> IntPoly:
    J = build_join_formula(psi)
    if via == "class":
        return class_to_Q(pieces_class(formula_to_pieces(J, cfg.piece_cap)))
    return pseudo(formula_poincare(J, cap=cfg.piece_cap, face_cap=cfg.face_cap))


def _omega(args, psi):
    if args.omega:
        return parse_omega(args.omega)
    if psi.prefix is None:
        raise UsageError("--omega is required when the formula has no prefix")
    return psi.prefix


def _range(spec: str) -> tuple[str, list[int]]:
    try:
        name, rng = spec.split("=")
        lo, hi = rng.split("..")
        return name.strip(), list(range(int(lo), int(hi) + 1))
    except ValueError:
        raise UsageError(f"--sweep expects NAME=LO..HI, got {spec!r}") from None


def _prime_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}") from None


def _kv(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        try:
            k, v = item.split("=")
            out[k.strip()] = int(v)
        except ValueError:
            raise UsageError(f"--args expects NAME=INT pairs, got {item!r}") from None
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_join(args, cfg):
    psi = _load(args.formula)
    if args.sentence and psi.free_count:
        raise UsageError(f"--sentence: the formula has {psi.free_count} free blocks")
    params = params_for(psi)
    out = {"params": params.to_dict()}
    if args.stats:
        out["stats"] = join_size_stats(psi, params).to_dict()
    if args.emit:
        text = format_formula(build_join_formula(psi, params))
        if args.emit == "-":
            return text
        with open(args.emit, "w") as fh:
            fh.write(text + "\n")
        out["written"] = args.emit
    if cfg.mode == "text":
        lines = ["i\tN\td\tm\tmsig"]
        for row in params.table():
            lines.append("\t".join("-" if row[k] is None else str(row[k])
                                   for k in ("i", "N", "d", "m")) + "\t" + str(row["msig"]))
        if "stats" in out:
            lines += [f"{k}: {v}" for k, v in out["stats"].items()]
        return "\n".join(lines)
    return out


def cmd_qe(args, cfg):
    psi = _load(args.formula)
    params = params_for(psi)
    omega = _omega(args, psi)
    if args.q is not None and args.q_join is not None:
        raise UsageError("--q and --q-join are exclusive")
    if args.q_join is not None:
        if not os.path.exists(args.q_join):
            raise UsageError(f"--q-join: no such file {args.q_join!r}")
        with open(args.q_join) as fh:
            qJ = IntPoly.from_json(fh.read())
    elif args.q is not None:
        qJ = IntPoly.from_json(args.q)
    elif args.compute_q:
        qJ = _join_q(psi, cfg, args.via)
    else:
        raise UsageError("qe needs --compute-q or --q POLY")
    spec = build_F_omega(params, omega)
    trace: list = []
    value = apply_operator_spec(spec, qJ, trace)
    if cfg.mode == "text":
        lines = []
        if cfg.trace:
            lines.append(f"Q(J) = {qJ}")
            lines.append(f"F = {spec}")
            lines += [f"stage {k} {name}: {q}" for k, name, q in trace]
        lines.append(str(value))
        return "\n".join(lines)
    out = {"omega": omega_string(omega), "qJ": qJ, "operator": str(spec), "result": value}
    if cfg.trace:
        out["trace"] = [{"stage": k, "op": name, "poly": q} for k, name, q in trace]
    return out


def cmd_decide(args, cfg):
    psi = _load(args.formula)
    params = params_for(psi)
    omega = _omega(args, psi)
    qJ = _join_q(psi, cfg, args.via)
    verdict = decide_sentence(qJ, params, omega)
    return verdict, ({"decision": verdict, "omega": omega_string(omega)}
                     if cfg.mode != "text" else ("true" if verdict else "false"))


def cmd_qpoly(args, cfg):
    psi = _load(args.formula)
    f = build_join_formula(psi) if args.join else psi.quantifier_free()
    if args.via == "class":
        q = class_to_Q(pieces_class(formula_to_pieces(f, cfg.piece_cap)))
        return str(q) if cfg.mode == "text" else {"Q": q}
    P = formula_poincare(f, cap=cfg.piece_cap, face_cap=cfg.face_cap)
    if args.poincare:
        return str(P) if cfg.mode == "text" else {"P": P}
    if cfg.mode == "text":
        return f"P = {P}\nQ = {pseudo(P)}"
    return {"P": P, "Q": pseudo(P)}


def cmd_count(args, cfg):
    psi = _load(args.formula).quantifier_free()
    rows = [{"q": q, "points": count_points(psi, q, cfg.budget, cfg.threads)} for q in args.q]
    if cfg.mode == "text":
        return "\n".join(f"{r['q']}\t{r['points']}" for r in rows)
    return rows if cfg.mode == "csv" else {"counts": rows}


def cmd_class(args, cfg):
    psi = _load(args.formula).quantifier_free()
    primes = cfg.primes
    if args.from_counts:
        try:
            primes = tuple(int(x) for x in args.from_counts.split(","))
        except ValueError:
            raise UsageError(f"--from-counts expects a comma list, got {args.from_counts!r}") from None
        RunConfig("class", primes=primes)
        args.method = "counts"
    if args.method == "counts":
        if not primes:
            raise UsageError("--method counts needs --primes or --from-counts")
        c = class_from_counts(psi, primes, cfg.budget, cfg.threads)
    else:
        c = pieces_class(formula_to_pieces(psi, cfg.piece_cap), args.method)
    return str(c) if cfg.mode == "text" else {"class_in_L": c.poly_in_L, "method": args.method}


def cmd_bounds(args, cfg):
    base = _kv(args.args)
    if args.sweep:
        var, values = _range(args.sweep)
        rows = []
        for v in values:
            res = bounds.bound_result(args.kind, args.method, args.char0, **{**base, var: v})
            rows.append({**{k: v2 for k, v2 in res.args.items()}, "kind": args.kind,
                         "method": res.method.value, "value": res.value})
        rows.sort(key=lambda r: r[var])
        if args.plot:
            from .plotting import plot_sweep
            plot_sweep(rows, var, args.plot)
        if cfg.mode == "text":
            return "\n".join(f"{r[var]}\t{r['value']}" for r in rows)
        return rows
    res = bounds.bound_result(args.kind, args.method, args.char0, **base)
    if cfg.mode == "text":
        lines = []
        if cfg.trace:
            lines += [f"{name}{tuple(a)} = {v}" for name, a, v in res.formula_trace]
        lines.append(str(res.value) if res.ceiling is None else f"{res.value}\t{res.ceiling}")
        return "\n".join(lines)
    out = res.to_dict()
    if not cfg.trace:
        out.pop("trace")
    return out


def cmd_compare(args, cfg):
    if args.what == "gap":
        table = compare.gap_table(args.n_max, args.n_min)
        if args.plot:
            from .plotting import plot_gap
            plot_gap(table, args.plot)
        rows = [{"n": r.n, "hypercover": r.hypercover_value, "join": r.join_value,
                 "ratio": r.ratio} for r in table]
        if cfg.mode == "text":
            lines = ["n\thypercover\tjoin\tratio"]
            lines += [f"{r['n']}\t{r['hypercover']}\t{r['join']}\t{float(r['ratio']):.6g}"
                      for r in rows]
            return "\n".join(lines)
        if cfg.mode == "csv":
            return rows
        return {"rows": rows}
    if args.what == "defect":
        res = compare.join_defect_betti(args.N, args.n, args.r)
        scan = compare.defect_threshold_scan(args.n, args.r)
        out = {**res.to_dict(), "scan_threshold": scan}
        if cfg.mode == "text":
            return "\n".join([f"betti: {list(res.betti)}", f"threshold: {res.threshold}",
                              f"slack: {res.slack}", f"scan: {scan}"])
        return out
    if args.what == "telescope":
        if args.formula is None or args.p is None:
            raise UsageError("compare telescope needs --formula and --p")
        from .joinctor import relative_join_formula
        psi = _load(args.formula)
        J = relative_join_formula(psi, args.p)
        P = formula_poincare(J, max_degree=args.p - 1, cap=cfg.piece_cap, face_cap=cfg.face_cap)
        even, odd = compare.telescoped_betti_sums(P, args.p)
        if cfg.mode == "text":
            return f"even: {even}\nodd: {odd}"
        return {"even_sum": even, "odd_sum": odd, "join_betti": P, "p": args.p}
    raise UsageError(f"unknown comparison {args.what!r}")


def cmd_verify(args, cfg):
    psi = _load(args.formula)
    fn = (compare.verify_poincare_congruence if args.what == "poincare"
          else compare.verify_join_connectivity)
    rep = fn(psi, args.p, face_cap=cfg.face_cap)
    if cfg.mode == "text":
        return "\n".join([f"{rep.name}: {'holds' if rep.holds else 'FAILS'}",
                          f"lhs: {rep.lhs}", f"rhs: {rep.rhs}"])
    return rep.to_dict()


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, allow_abbrev=False)
    out = common.add_mutually_exclusive_group()
    out.add_argument("--json", dest="mode", action="store_const", const="json")
    out.add_argument("--csv", dest="mode", action="store_const", const="csv")
    common.add_argument("--trace", action="store_true")

    p = _Parser(prog="cohomqe", allow_abbrev=False,
                description="Quantifier elimination through join polynomials.")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for point counting (COHOMQE_THREADS overrides)")
    p.add_argument("--piece-cap", type=int, default=DEFAULT_PIECE_CAP,
                   help="limit on partial pieces while expanding a formula")
    p.add_argument("--face-cap", type=int, default=DEFAULT_FACE_CAP,
                   help="limit on cells in the Betti computation")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="limit on points enumerated by count")
    p.add_argument("--primes", type=_prime_list, default=(), help="comma list, e.g. 2,3,5,7")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("join", parents=[common], help="join parameters, size and formula")
    s.add_argument("--formula", required=True)
    s.add_argument("--stats", action="store_true")
    s.add_argument("--emit", "--out", dest="emit", metavar="FILE",
                   help="write the join formula ('-' for stdout)")
    s.add_argument("--sentence", action="store_true", help="require a formula without free blocks")
    s.set_defaults(func=cmd_join)

    helps = {"qe": "pseudo-Poincare polynomial of a quantified formula",
             "decide": "truth value of a sentence (exit 1 when false)"}
    for name, func in (("qe", cmd_qe), ("decide", cmd_decide)):
        s = sub.add_parser(name, parents=[common], help=helps[name])
        s.add_argument("--formula", required=True)
        s.add_argument("--omega", help="quantifier word over E/A, outermost first")
        s.add_argument("--via", choices=("betti", "class"), default="betti")
        if name == "qe":
            s.add_argument("--compute-q", action="store_true")
            s.add_argument("--q", help="join polynomial as a JSON list of coefficients")
            s.add_argument("--q-join", metavar="FILE", help="read the join polynomial from a JSON file")
        s.set_defaults(func=func)

    s = sub.add_parser("qpoly", parents=[common], help="(pseudo-)Poincare polynomial")
    s.add_argument("--formula", required=True)
    s.add_argument("--join", action="store_true", help="use the join formula instead")
    s.add_argument("--poincare", action="store_true", help="report P only")
    s.add_argument("--via", choices=("betti", "class"), default="betti")
    s.set_defaults(func=cmd_qpoly)

    s = sub.add_parser("count", parents=[common], help="points over prime fields")
    s.add_argument("--formula", required=True)
    s.add_argument("--q", "--prime", dest="q", type=int, nargs="+", required=True)
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("class", parents=[common], help="class in the Grothendieck ring")
    s.add_argument("--formula", required=True)
    s.add_argument("--method", choices=("scissor", "subsets", "counts"), default="scissor")
    s.add_argument("--from-counts", metavar="P1,P2,...", help="shorthand for --method counts")
    s.set_defaults(func=cmd_class)

    s = sub.add_parser("bounds", parents=[common], help="explicit Betti and Euler bounds")
    s.add_argument("--kind", choices=bounds.KINDS, required=True)
    s.add_argument("--method", choices=[m.value for m in bounds.BoundMethod], default="as")
    s.add_argument("--char0", action="store_true", help="assert characteristic zero")
    s.add_argument("--args", nargs="*", metavar="NAME=INT")
    s.add_argument("--sweep", metavar="NAME=LO..HI")
    s.add_argument("--plot", metavar="FILE", help="with --sweep, save a figure")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("compare", parents=[common], help="join versus other estimates")
    s.add_argument("what", choices=("gap", "defect", "telescope"))
    s.add_argument("--n-max", type=int, default=20)
    s.add_argument("--n-min", type=int, default=1)
    s.add_argument("--N", type=int, default=0)
    s.add_argument("--n", type=int)
    s.add_argument("--r", type=int)
    s.add_argument("--formula")
    s.add_argument("--p", type=int)
    s.add_argument("--plot", metavar="FILE")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("verify", parents=[common], help="exact join checks on linear inputs")
    s.add_argument("what", choices=("poincare", "connectivity"))
    s.add_argument("--formula", required=True)
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(func=cmd_verify)
    return p


def _threads(flag: int) -> int:
    env = os.environ.get("COHOMQE_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"COHOMQE_THREADS must be an integer, got {env!r}") from None
    return flag


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = sys.stdout.buffer if hasattr(sys.stdout, "buffer") else None
    try:
        args = build_parser().parse_args(argv)
        if args.cmd == "compare" and args.what == "defect" and (args.n is None or args.r is None):
            raise UsageError("compare defect needs --n and --r")
        cfg = RunConfig(args.cmd, [getattr(args, "formula", None)], args.mode or "text",
                        args.piece_cap, args.face_cap, args.budget, args.primes, args.trace,
                        _threads(args.threads))
        result = args.func(args, cfg)
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error": "UsageError", "message": str(exc)},
                                    sort_keys=True) + "\n")
        return 2
    except CohomQEError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True) + "\n")
        return 3
    code = 0
    if args.cmd == "decide":
        verdict, result = result
        code = 0 if verdict else 1
    data = emit_report(result, cfg.mode)
    if stdout is not None:
        stdout.write(data)
        stdout.flush()
    else:
        sys.stdout.write(data.decode())
    return code


if __name__ == "__main__":
    sys.exit(main())
