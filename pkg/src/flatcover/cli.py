"""Command-line front end.

Every subcommand prints a JSON run report (command echo, versions, seed,
wall time, result payload) unless a human-readable view is requested.
Exit codes: 0 ok, 1 property fails, 2 infeasible, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys
import time
from pathlib import Path

import mpmath
import numpy as np

from . import __version__, bounds, codes, constructions, exact, setfile, verify
from .errors import ConstructionError, InfeasibleError, ParameterError

REPORT_SCHEMA = "flatcover.report/1"
EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2, 64

METHODS = (
    "sum3", "simplex", "bch", "generic_code", "product",
    "balanced", "prime", "multiblock", "rk",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parts(text: str) -> list[tuple[int, int]]:
    out = []
    for chunk in text.split(","):
        a, sep, b = chunk.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"part {chunk!r} is not r_i:d_i")
        out.append((int(a), int(b)))
    return out


def _range(text: str) -> list[int]:
    a, sep, b = text.partition(":")
    return list(range(int(a), int(b) + 1)) if sep else [int(a)]


# -- building records from flags (also used to rebuild from a sidecar) --------

def _code_from_spec(spec: str) -> codes.LinearCode:
    name, _, rest = spec.partition(":")
    args = [int(x) for x in rest.split(":") if x]
    if name == "simplex" and len(args) == 1:
        return codes.simplex_code(args[0])
    if name == "dual_bch" and len(args) == 2:
        return codes.dual_bch(*args)
    raise ParameterError(f"unknown code {spec!r}; use simplex:<d> or dual_bch:<m>:<e>")


def _factor(spec: str, d: int) -> constructions.ConstructionRecord:
    kind, _, r = spec.partition(":")
    r = int(r)
    if kind == "sum3":
        if d != 2:
            raise ParameterError("sum3 factors are 2-complete; use --d 2")
        return constructions.sum3_complete(r)
    if kind == "simplex":
        return constructions.complete_simplex(r, d)
    if kind == "full":
        return constructions._trivial_complete(r, d, "simplex")
    raise ParameterError(f"unknown factor {spec!r}; use sum3:<r>, simplex:<r> or full:<r>")


def build_record(method: str, r: int, d: int, params: dict) -> constructions.ConstructionRecord:
    if method == "sum3":
        if d != 2:
            raise ParameterError("sum3 builds a 2-complete set; use --d 2")
        return constructions.sum3_complete(r)
    if method == "simplex":
        return constructions.complete_simplex(r, d)
    if method == "bch":
        return constructions.complete_bch(r, d, params.get("m"), params.get("e"))
    if method == "generic_code":
        if not params.get("code"):
            raise ParameterError("generic_code needs --code")
        return constructions.complete_from_code(_code_from_spec(params["code"]), r, d)
    if method == "product":
        factors = params.get("factors") or []
        if len(factors) != 2:
            raise ParameterError("product needs --factors with two entries")
        rec = constructions.complete_product(_factor(factors[0], d), _factor(factors[1], d))
        if rec.r != r:
            raise ParameterError(f"factors give r={rec.r}, not {r}")
        return rec
    if method == "balanced":
        return constructions.nonblocking_balanced(r, d)
    if method == "prime":
        return constructions.nonblocking_prime(r, d)
    if method == "multiblock":
        if not params.get("parts"):
            raise ParameterError("multiblock needs --parts")
        return constructions.nonblocking_multiblock(r, d, [tuple(p) for p in params["parts"]])
    if method == "rk":
        return constructions.nonblocking_rk(r, d)
    raise ParameterError(f"unknown method {method!r}")


def _bracket(rec: constructions.ConstructionRecord) -> tuple[int | None, int | None]:
    if rec.r > bounds.MULTIBLOCK_DP_MAX_R:
        return None, None
    row = bounds.bounds_row(rec.r, rec.d)
    lo, hi = row.gamma_bracket if rec.mode == "complete" else row.beta_bracket
    return hi, lo


# -- commands -----------------------------------------------------------------

def cmd_construct(args) -> tuple[int, dict]:
    params = {"parts": args.parts, "m": args.m, "e": args.e, "code": args.code, "factors": args.factors}
    params = {k: v for k, v in params.items() if v is not None}
    rec = build_record(args.method, args.r, args.d, params)
    upper, lower = _bracket(rec)
    side = rec.sidecar()
    side.update({"bound_upper": upper, "bound_lower": lower, "method": args.method,
                 "params": {k: (v if k != "parts" else [list(p) for p in v]) for k, v in params.items()}})
    payload = dict(side)
    if args.out:
        setfile.write(args.out, rec.pointset, "hexmask" if args.hex else "points")
        sidecar_path = Path(str(args.out) + ".json")
        sidecar_path.write_text(json.dumps(side, indent=1, sort_keys=True) + "\n")
        payload["file"] = str(args.out)
        payload["sidecar"] = str(sidecar_path)
    if args.check:
        rep = verify.check_witnesses(rec, seed=args.seed)
        payload["witness_check"] = rep.to_json()
        if not rep.holds:
            return EXIT_FAIL, payload
    return EXIT_OK, payload


def cmd_verify(args) -> tuple[int, dict]:
    s = setfile.read(args.set)
    budget = args.budget
    if args.witness:
        side = json.loads(Path(args.witness).read_text())
        rec = build_record(side["method"], side["r"], side["d"], side.get("params", {}))
        if rec.mode != args.mode or rec.d != args.d:
            raise UsageError(f"record is {rec.mode} with d={rec.d}, flags ask for {args.mode} with d={args.d}")
        rep = verify.check_witnesses(rec, members=s, sample=args.sample, seed=args.seed)
    elif args.mode == "complete":
        rep = verify.is_complete(s, args.d, exhaustive=args.exhaustive, sample=args.sample,
                                 seed=args.seed, budget=budget, workers=args.threads)
    else:
        rep = verify.is_nonblocking(s, args.d, exhaustive=args.exhaustive, sample=args.sample,
                                    seed=args.seed, budget=budget, workers=args.threads)
    payload = rep.to_json()
    payload.update({"r": s.r, "size": len(s)})
    return (EXIT_OK if rep.holds else EXIT_FAIL), payload


def cmd_exact(args) -> tuple[int, dict]:
    cache = exact.ExactCache(args.cache) if args.cache else None
    if args.quantity == "sum3":
        res = exact.exact_sum3(args.r, budget=args.budget)
    elif args.quantity == "gamma":
        res = exact.exact_gamma(args.r, args.d, budget=args.budget, cache=cache)
    else:
        res = exact.exact_beta(args.r, args.d, budget=args.budget, cache=cache)
    return EXIT_OK, res.to_json()


def _bounds_text(row: bounds.BoundsRow) -> str:
    lines = [f"r={row.r} d={row.d}"]
    for quantity, lows, ups, bracket in (
        ("gamma", row.gamma_lower, row.gamma_upper, row.gamma_bracket),
        ("beta", row.beta_lower, row.beta_upper, row.beta_bracket),
    ):
        lines.append(f"  {quantity}: [{bracket[0]}, {bracket[1]}]")
        for b in lows + ups:
            rel = {("lower", True): ">", ("lower", False): ">=",
                   ("upper", True): "<", ("upper", False): "<="}[b.side, b.strict]
            lines.append(f"    {b.name:28s} {rel:2s} {b.to_json()['value']}  (=> {b.implied()})")
    return "\n".join(lines)


def cmd_bounds(args) -> tuple[int, dict | str]:
    row = bounds.bounds_row(args.r, args.d, bch_k=args.bch_k)
    if not args.json:
        return EXIT_OK, _bounds_text(row)
    return EXIT_OK, row.to_json()


def _render(rows: list[dict], fmt: str) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    head = "| " + " | ".join(cols) + " |"
    sep = "|" + "|".join("---" for _ in cols) + "|"
    body = ["| " + " | ".join(str(row[c]) for c in cols) + " |" for row in rows]
    return "\n".join([head, sep, *body])


def cmd_table(args) -> tuple[int, dict | str]:
    rs = _range(args.r)
    if args.kind == "exact":
        cache = exact.ExactCache(args.cache) if args.cache else None
        rows = exact.exact_table(rs, budget=args.budget, cache=cache)
        flat = [{k: (" ".join(map(str, v)) if isinstance(v, list) else v) for k, v in row.items()}
                for row in rows]
    else:
        rows, flat = [], []
        for r in rs:
            for d in range(r + 1):
                row = bounds.bounds_row(r, d, bch_k=args.bch_k)
                rows.append(row.to_json())
                (gl, gu), (bl, bu) = row.gamma_bracket, row.beta_bracket
                flat.append({"r": r, "d": d, "gamma_lower": gl, "gamma_upper": gu,
                             "beta_lower": bl, "beta_upper": bu})
    if args.format == "json":
        return EXIT_OK, {"kind": args.kind, "rows": rows}
    return EXIT_OK, _render(flat, args.format)


def cmd_code(args) -> tuple[int, dict]:
    if args.family == "simplex":
        if args.d is None:
            raise UsageError("simplex needs --d")
        code = codes.simplex_code(args.d)
    else:
        if args.m is None or args.e is None:
            raise UsageError("dual_bch needs --m and --e")
        code = codes.dual_bch(args.m, args.e)
    stats = codes.weight_stats(code, workers=args.threads)
    payload = stats.to_json(code)
    payload.update({"name": code.name, "min_nonzero": stats.min_nonzero, "max": stats.max})
    if args.family == "dual_bch":
        payload["carlitz_uchiyama"] = codes.carlitz_uchiyama_check(code, args.m, args.e)
        payload["carlitz_uchiyama_loose"] = codes.carlitz_uchiyama_check(code, args.m, args.e, loose=True)
    return EXIT_OK, payload


# -- parser and entry point ---------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=lambda x: int(x, 0), default=verify.DEFAULT_SEED)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--budget", type=int, default=None,
                        help="search budget in membership tests (env FLATCOVER_BUDGET)")

    p = _Parser(prog="flatcover", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", parents=[common], help="build a set with witnesses")
    c.add_argument("--method", required=True, choices=METHODS)
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--parts", type=_parts)
    c.add_argument("--m", type=int)
    c.add_argument("--e", type=int)
    c.add_argument("--code", help="simplex:<d> or dual_bch:<m>:<e> for generic_code")
    c.add_argument("--factors", type=lambda x: x.split(","), help="two of sum3:<r>, simplex:<r>, full:<r>")
    c.add_argument("--out", type=Path)
    c.add_argument("--hex", action="store_true", help="write the hexmask form")
    c.add_argument("--check", action="store_true", help="also validate the witness map")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common], help="decide completeness or non-blocking")
    v.add_argument("--set", required=True, type=Path)
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--mode", required=True, choices=("complete", "nonblocking"))
    g = v.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--sample", type=int)
    v.add_argument("--witness", type=Path, help="sidecar JSON of the record to check witnesses of")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("exact", parents=[common], help="exact gamma_r(d) or beta_r(d)")
    e.add_argument("--r", type=int, required=True)
    e.add_argument("--d", type=int, default=2)
    e.add_argument("--quantity", choices=("gamma", "beta", "sum3"), default="gamma")
    e.add_argument("--cache", type=Path)
    e.set_defaults(func=cmd_exact)

    b = sub.add_parser("bounds", parents=[common], help="all bounds at (r, d)")
    b.add_argument("--r", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--json", action="store_true")
    b.add_argument("--bch-k", type=float, default=bounds.DEFAULT_BCH_K)
    b.set_defaults(func=cmd_bounds)

    t = sub.add_parser("table", parents=[common], help="exact values or bound brackets over a range of r")
    t.add_argument("--r", required=True, help="n or a:b")
    t.add_argument("--kind", choices=("exact", "bounds"), default="exact")
    t.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    t.add_argument("--cache", type=Path)
    t.add_argument("--bch-k", type=float, default=bounds.DEFAULT_BCH_K)
    t.set_defaults(func=cmd_table)

    k = sub.add_parser("code", parents=[common], help="weight distribution of a code")
    k.add_argument("--family", choices=("simplex", "dual_bch"), required=True)
    k.add_argument("--d", type=int)
    k.add_argument("--m", type=int)
    k.add_argument("--e", type=int)
    k.set_defaults(func=cmd_code)
    return p


def _versions() -> dict:
    return {"flatcover": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "mpmath": mpmath.__version__}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget is None:
        args.budget = verify.default_budget()
    start = time.perf_counter()
    error = None
    try:
        code, payload = args.func(args)
    except InfeasibleError as exc:
        code, payload, error = EXIT_INFEASIBLE, None, str(exc)
    except (ParameterError, ConstructionError, UsageError) as exc:
        code, payload, error = EXIT_USAGE, None, str(exc)
    if isinstance(payload, str):
        print(payload)
        return code
    report = {
        "schema": REPORT_SCHEMA,
        "command": ["flatcover", *argv],
        "versions": _versions(),
        "seed": args.seed,
        "wall_time": round(time.perf_counter() - start, 6),
        "exit_code": code,
        "result": payload,
    }
    if error is not None:
        report["error"] = error
        print(f"flatcover: {error}", file=sys.stderr)
    print(json.dumps(report, indent=1, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
