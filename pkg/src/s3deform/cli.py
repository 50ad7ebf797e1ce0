"""Command-line entry point: ``s3deform <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import deformation as dfm
from . import family_search as fs
from . import s3_modules as s3m
from .classification import ClassifyParams, classify_extension
from .config import RunConfig, load_config
from .errors import S3DeformError

log = logging.getLogger("s3deform")

EXIT_OK = 0
EXIT_FAIL = 1  # a check failed or a counterexample was found
EXIT_ERROR = 2  # structural or usage error


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="s3deform", description="S3-extensions, degeneracy indices and deformations at p > 3.")
    ap.add_argument("--format", choices=("json", "text"), help="output format (default text)")
    ap.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify x^3 + c2 x^2 + c1 x + c0 at p")
    c.add_argument("coeffs", nargs=3, type=int, metavar="C", help="c2 c1 c0")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--max-index", type=int)
    c.add_argument("--precision", type=int, help="p-adic digits")
    c.add_argument("--height-bound", type=int)
    c.add_argument("--minkowski-ceiling", type=float)

    s = sub.add_parser("search", help="scan x^3 + ax + 1 for a in a range")
    s.add_argument("--range", type=_range, required=True, metavar="A:B", help="inclusive range of a, e.g. -1:12")
    s.add_argument("--workers", type=int)
    s.add_argument("--ledger", metavar="PATH")
    s.add_argument("--resume", action="store_true")
    s.add_argument("--chunk-size", type=int, default=4096)

    h = sub.add_parser("high-index", help="candidates x^3 + r x^2 + s x - 1 with p^n | r + s")
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--r-bound", type=int, default=30)
    h.add_argument("--s-bound", type=int, default=30)
    h.add_argument("--classify", action="store_true", help="run the classifier on each candidate")

    d = sub.add_parser("deform-verify", help="check the relations of the universal deformation")
    d.add_argument("--p", type=int, required=True)
    d.add_argument("--N", type=int)
    d.add_argument("--D", type=int)
    d.add_argument("--variant", choices=dfm.VARIANTS, default="as-printed")

    lo = sub.add_parser("loci-eval", help="locus membership of a point of (pZ_p)^3")
    lo.add_argument("--p", type=int, required=True)
    lo.add_argument("--N", type=int)
    lo.add_argument("--D", type=int)
    lo.add_argument("--point", nargs=3, type=_rational, required=True, metavar="T")

    m = sub.add_parser("s3mod-check", help="intersection and inertia checks on a synthetic model")
    m.add_argument("--p", type=int, required=True)
    m.add_argument("--j", type=int, required=True)
    m.add_argument("--i", type=int, required=True)
    return ap


# -- commands ----------------------------------------------------------------------


def cmd_classify(args, cfg: RunConfig) -> tuple[int, dict, str]:
    params = ClassifyParams(max_index=cfg.max_index, precision=cfg.precision,
                            height_bound=cfg.height_bound, minkowski_ceiling=cfg.minkowski_ceiling)
    rep = classify_extension(args.coeffs, args.p, params)
    code = EXIT_ERROR if rep.failure else EXIT_OK
    return code, rep.to_dict(), rep.render_text()


def _ledger_path(args, cfg: RunConfig) -> Path | None:
    if args.ledger:
        return Path(args.ledger)
    if cfg.ledger_dir:
        lo, hi = args.range
        return Path(cfg.ledger_dir) / f"family_{lo}_{hi}.csv"
    return None


def cmd_search(args, cfg: RunConfig) -> tuple[int, dict, str]:
    lo, hi = args.range
    path = _ledger_path(args, cfg)
    summary = fs.scan_family_range(lo, hi, ledger_path=path, workers=cfg.workers,
                                   resume=args.resume, chunk_size=args.chunk_size)
    d = summary.to_dict()
    d["ledger"] = str(path) if path else None
    lines = [
        f"range        a in [{lo}, {hi}]",
        f"records      {summary.records}",
        f"prime        {summary.n_primes} (generic {summary.generic})",
        f"composite    {summary.composite}",
    ]
    if summary.skipped:
        lines.append(f"skipped      {summary.skipped} (outside primality range)")
    if len(summary.primes) <= 20:
        lines.append("members      " + ", ".join(f"a={a} p={p}" for a, p in summary.primes))
    if path:
        lines.append(f"ledger       {path}")
    if summary.alarm:
        lines.append("ALARM        nongeneric prime members: " + ", ".join(f"a={a} p={p}" for a, p in summary.nongeneric))
    return (EXIT_FAIL if summary.alarm else EXIT_OK), d, "\n".join(lines)


def cmd_high_index(args, cfg: RunConfig) -> tuple[int, dict, str]:
    cands = fs.high_index_candidate_search(args.p, args.n, args.r_bound, args.s_bound)
    rows = []
    lines = [f"p = {args.p}, n = {args.n}: {len(cands)} candidates"]
    for c in cands:
        row = {"r": c.r, "s": c.s, "poly_disc": c.poly_disc, "root": c.root,
               "root_minus_one_valuation": c.root_minus_one_valuation,
               "unit_power_index": c.unit_power_index}
        text = (f"  r={c.r:4d} s={c.s:4d} disc={c.poly_disc} v(root-1)={c.root_minus_one_valuation}"
                f" index(x)={c.unit_power_index}")
        if args.classify:
            rep = classify_extension(c.coefficients, args.p, ClassifyParams(max_index=cfg.max_index))
            row["verdict"] = rep.verdict
            row["degeneracy_index"] = rep.degeneracy_index
            text += f" verdict={rep.verdict} index={rep.degeneracy_index}"
        rows.append(row)
        lines.append(text)
    return EXIT_OK, {"p": args.p, "n": args.n, "candidates": rows}, "\n".join(lines)


def cmd_deform_verify(args, cfg: RunConfig) -> tuple[int, dict, str]:
    N, D = args.N or cfg.N, args.D or cfg.D
    images = dfm.universal_deformation(args.p, N, D, args.variant)
    rep = dfm.verify_group_relations(images)
    residual = dfm.residual_rep(args.p)
    red_ok = images["sigma"].residual() == residual["sigma"] and images["tau"].residual() == residual["tau"]
    d = rep.to_dict()
    d["variant"] = args.variant
    d["residual_matches"] = red_ok
    d["u_is_scalar"] = images["u"].a == images["u"].d
    d["passed"] = rep.passed and red_ok
    lines = [f"universal deformation, p={args.p} N={N} D={D} ({args.variant})"]
    lines += ["  " + r.describe() for r in rep.results]
    lines.append(f"  reduction equals residual representation: {'pass' if red_ok else 'FAIL'}")
    if d["u_is_scalar"]:
        lines.append("  note: the u-image is scalar, so T2 does not occur")
    return (EXIT_OK if d["passed"] else EXIT_FAIL), d, "\n".join(lines)


def cmd_loci_eval(args, cfg: RunConfig) -> tuple[int, dict, str]:
    N, D = args.N or cfg.N, args.D or cfg.D
    try:
        pt = dfm.SpecializationPoint.from_rationals(args.p, N, args.point)
    except ValueError as exc:
        raise S3DeformError(str(exc)) from exc
    f, g = dfm.default_fg(args.p, N, D)
    rep = dfm.evaluate_loci(pt, f, g)
    lines = [f"point {rep['point']} at p={args.p}, known mod p^{rep['precision']}"]
    for name, q in rep["values"].items():
        state = "0" if q["zero_to_precision"] else f"{q['value']} (valuation {q['valuation']})"
        lines.append(f"  {name:6s} = {state}")
    for name, l in rep["loci"].items():
        lines.append(f"  {name}: {'yes' if l['member'] else 'no'}  [{l['basis']}]")
    lines += [f"  note: {n}" for n in rep["notes"]]
    return EXIT_OK, rep, "\n".join(lines)


def cmd_s3mod_check(args, cfg: RunConfig) -> tuple[int, dict, str]:
    p, j, i = args.p, args.j, args.i
    model = s3m.build_degenerate_model(p, j, i)
    want = [p ** min(i, j)] if min(i, j) else []
    pairs = {f"{a}{b}": s3m.image_intersection(model, a, b) for a, b in ((1, 2), (1, 3), (2, 3))}
    triple = s3m.triple_intersection(model)
    exact = model.exactness()
    ok = all(v == want for v in pairs.values()) and triple == want and all(exact.values())
    d: dict[str, Any] = {
        "p": p, "j": j, "i": i,
        "expected": want, "pairs": pairs, "triple": triple,
        "exactness": exact, "P_type": list(s3m.isotypic_decompose(model.P)),
    }
    if i >= j:
        v = s3m.inertia_span_check(model)
        d["inertia"] = {"R": list(v.R_type), "S": list(v.S_type), "spans_P": v.spans_P, "passed": v.passed}
        ok = ok and v.passed
    else:
        d["inertia"] = None
    d["passed"] = ok
    show = lambda orders: " x ".join(f"Z/{o}" for o in orders) or "0"
    lines = [f"model p={p} j={j} i={i}: P has type {tuple(d['P_type'])}"]
    lines += [f"  P_{k[0]} cap P_{k[1]} = {show(v)}" for k, v in pairs.items()]
    lines.append(f"  triple      = {show(triple)}  (expected {show(want)})")
    lines.append(f"  exactness   {'pass' if all(exact.values()) else 'FAIL'}")
    if d["inertia"]:
        inn = d["inertia"]
        lines.append(f"  inertia     R {tuple(inn['R'])}, S {tuple(inn['S'])}, R + S = P: {inn['spans_P']}")
    else:
        lines.append("  inertia     skipped (i < j)")
    return (EXIT_OK if ok else EXIT_FAIL), d, "\n".join(lines)


COMMANDS = {
    "classify": cmd_classify,
    "search": cmd_search,
    "high-index": cmd_high_index,
    "deform-verify": cmd_deform_verify,
    "loci-eval": cmd_loci_eval,
    "s3mod-check": cmd_s3mod_check,
}


def _join_range(argv: list[str]) -> list[str]:
    # "--range -1:12" would otherwise be read as an option flag
    out: list[str] = []
    it = iter(argv)
    for a in it:
        if a == "--range":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--range={nxt}")
        else:
            out.append(a)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(_join_range(list(sys.argv[1:] if argv is None else argv)))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        max_index = getattr(args, "max_index", None)
        precision = getattr(args, "precision", None)
        if precision is None and max_index is not None:
            precision = max(cfg.precision, max_index + 2)
        cfg = cfg.with_overrides(
            format=args.format,
            max_index=max_index,
            precision=precision,
            height_bound=getattr(args, "height_bound", None),
            minkowski_ceiling=getattr(args, "minkowski_ceiling", None),
            workers=getattr(args, "workers", None),
        )
        code, data, text = COMMANDS[args.command](args, cfg)
    except (S3DeformError, ValueError, FileExistsError, OSError) as exc:
        fmt = args.format or "text"
        if fmt == "json":
            print(json.dumps({"command": args.command, "exit_code": EXIT_ERROR,
                              "error": {"type": type(exc).__name__, "message": str(exc)}}, indent=2))
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if cfg.format == "json":
        print(json.dumps({"command": args.command, "exit_code": code, "result": data}, indent=2, default=str))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
