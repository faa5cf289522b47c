"""Command line driver: root data, root vectors and verification suites.

Exit codes: 0 pass, 1 verification failure, 2 invalid Satake data or usage,
3 stabilization failure, 4 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time

from .iqg import ParameterError, diamond_params, shifted_params
from .kmatrix import check_support, integrality_report, quasiK_closed_AIV, solve_rank1_quasiK, verify_intertwining
from .modified import ModifiedError, modified_iqg
from .pbw import MAX_MONOMIALS, verify_pbw
from .relbraid import RootVectorTable, StabilizationError
from .rootdata import BUILTINS, SatakeError, builtin_satake, satake_from_config
from .scalars import format_scalar
from .utilde import ResourceCapError

SCHEMA = "iqpbw.report/1"

EXIT_OK, EXIT_FAIL, EXIT_SATAKE, EXIT_STABILIZATION, EXIT_RESOURCE = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


# -- configuration ------------------------------------------------------------------------

def _parse_nodes(text: str) -> list:
    text = (text or "").strip()
    if not text:
        return []
    return [int(a) for a in re.split(r"[,\s]+", text) if a]


def _parse_tau(text: str):
    """'id', '' or pairs such as '1-3,2-4' (1-based)."""
    text = (text or "id").strip()
    if text in ("id", ""):
        return "id"
    pairs = []
    for part in re.split(r"[,\s]+", text):
        m = re.fullmatch(r"(\d+)-(\d+)", part)
        if not m:
            raise UsageError(f"cannot parse tau pair {part!r}; use e.g. 1-3,2-4")
        pairs.append([int(m.group(1)), int(m.group(2))])
    return pairs


def load_satake(args):
    if args.builtin:
        try:
            return builtin_satake(args.builtin)
        except KeyError as err:
            raise UsageError(str(err.args[0])) from None
    if args.satake:
        with open(args.satake) as fh:
            return satake_from_config(json.load(fh))
    if args.type:
        cfg = {"type": args.type, "black": _parse_nodes(args.black), "tau": _parse_tau(args.tau)}
        if args.rank:
            cfg["rank"] = args.rank
        return satake_from_config(cfg)
    raise UsageError("give --builtin, --satake or --type")


def parse_params(sd, spec: str | None):
    """'diamond', 'q^a*diamond' (uniform a) or 'q^[a1,...,an]*diamond' (per node, 1-based order)."""
    spec = (spec or "diamond").replace(" ", "")
    if spec == "diamond":
        return diamond_params(sd), spec
    m = re.fullmatch(r"q\^(-?\d+)\*diamond", spec)
    if m:
        a = int(m.group(1))
        return shifted_params(sd, {i: a for i in sd.white}), spec
    m = re.fullmatch(r"q\^\[([-\d,]+)\]\*diamond", spec)
    if m:
        shifts = [int(x) for x in m.group(1).split(",")]
        if len(shifts) != sd.rank:
            raise UsageError(f"expected {sd.rank} shifts")
        return shifted_params(sd, {i: shifts[i] for i in sd.white}), spec
    raise UsageError(f"cannot parse parameter spec {spec!r}")


def _params_json(params: dict) -> dict:
    return {str(i + 1): format_scalar(c) for i, c in sorted(params.items())}


def _root(b) -> list:
    return list(b)


# -- commands -----------------------------------------------------------------------------

def cmd_roots(args) -> tuple:
    sd = load_satake(args)
    rel = sd.positive_roots_w0()
    blk = sd.black_positive_roots()
    report = {
        "satake": sd.describe(),
        "positive_roots": [_root(b) for b in sd.cartan.positive_roots],
        "relative_roots": [_root(b) for b in rel],
        "black_roots": [_root(b) for b in blk],
        "counts": {"relative": len(rel), "black": len(blk), "total": len(sd.cartan.positive_roots)},
        "pass": True,
    }
    lines = [f"Satake datum {sd.name} ({sd.cartan.label}), black {sorted(j + 1 for j in sd.black)}, "
             f"tau {[sd.tau[i] + 1 for i in range(sd.rank)]}",
             f"w0 word {[j + 1 for j in sd.w0_word]}, relative word {[i + 1 for i in sd.w0_relative]}"]
    for i, w in sorted(sd.bs_words.items()):
        lines.append(f"  bs_{i + 1} = {[j + 1 for j in w]}")
    lines.append(f"{len(rel)}+{len(blk)} roots")
    for b in rel:
        lines.append(f"  relative {_root(b)}")
    for b in blk:
        lines.append(f"  black    {_root(b)}")
    return report, lines, EXIT_OK


def cmd_rootvec(args) -> tuple:
    sd = load_satake(args)
    t = RootVectorTable(sd, ladder={"cap": args.cap})
    bad = set(t.check_leading_terms())
    vecs = []
    lines = [f"root vectors of {sd.name} along the relative word {[i + 1 for i in t.relative_word]}"]
    for e in t.entries:
        ok = e["beta"] not in bad
        lead = t.F_root(e["beta"])
        vecs.append({"beta": _root(e["beta"]), "position": e["position"] + 1,
                     "expression": e["element"].to_sexpr(), "leading_term": str(lead),
                     "leading_term_pass": ok})
        lines.append(f"  B_{_root(e['beta'])} = {e['element'].to_sexpr()}   leading {lead}   "
                     f"{'PASS' if ok else 'FAIL'}")
    report = {"satake": sd.describe(), "cap": args.cap, "root_vectors": vecs, "pass": not bad}
    return report, lines, EXIT_OK if not bad else EXIT_FAIL


def _verify_pbw(args, sd) -> tuple:
    t = RootVectorTable(sd, ladder={"cap": args.cap})
    rep = verify_pbw(t, args.degree, args.max_monomials)
    report = {"suite": "pbw", "degree": args.degree,
              "table": [{"degree": d, "count": rep["counts"][d], "rank": rep["ranks"][d],
                         "expected": rep["expected"][d]} for d in sorted(rep["counts"])],
              "rank": rep["rank"], "pass": rep["pass"]}
    lines = ["degree  count  rank  expected"]
    for row in report["table"]:
        lines.append(f"{row['degree']:>6}  {row['count']:>5}  {row['rank']:>4}  {row['expected']:>8}")
    return report, lines


def _verify_quasik(args, sd) -> tuple:
    params, spec = parse_params(sd, args.params)
    nodes = []
    ok = True
    lines = []
    for i in sd.white_reps:
        K = solve_rank1_quasiK(sd, i, params, args.cutoff)
        inter, irep = verify_intertwining(K)
        support = check_support(K)
        integral, bad = integrality_report(K)
        entry = {"node": i + 1, "intertwining": inter, "failures": len(irep["failures"]),
                 "support": [list(mu) for mu in K.support()], "support_ok": support,
                 "integral": integral,
                 "witness": None if bad is None else {"mu": list(bad[0]), "key": bad[1], "coefficient": bad[2]}}
        fam = sd.families.get(i)
        if fam is not None and fam[0].name == "AIV":
            C = quasiK_closed_AIV(sd, params, args.cutoff)
            entry["closed_formula"] = all(K.component(mu) == C.component(mu)
                                          for mu in set(K.support()) | set(C.support()))
        node_ok = inter and support and integral and entry.get("closed_formula", True)
        entry["pass"] = node_ok
        ok &= node_ok
        nodes.append(entry)
        lines.append(f"node {i + 1}: intertwining {inter}, support {support}, integral {integral}"
                     + (f", closed formula {entry['closed_formula']}" if "closed_formula" in entry else "")
                     + f"  {'PASS' if node_ok else 'FAIL'}")
    return {"suite": "quasik", "cutoff": args.cutoff, "params": spec, "param_values": _params_json(params),
            "nodes": nodes, "pass": ok}, lines


def _labels(ctx) -> list:
    """The zero label and the classes of the fundamental weights."""
    n = ctx.sd.rank
    out = [ctx.zeta((0,) * n)]
    for j in range(n):
        z = ctx.zeta(tuple(1 if k == j else 0 for k in range(n)))
        if z not in out:
            out.append(z)
    return out


def _verify_integral(args, sd) -> tuple:
    params, spec = parse_params(sd, args.params)
    ctx = modified_iqg(sd, params)
    rows = []
    ok = True
    lines = []
    for zeta in _labels(ctx):
        for i in sd.white_reps:
            for m in range(args.m + 1):
                rep = ctx.integrality_test(ctx.idivided_power(i, m, zeta))
                rows.append({"element": f"B_{i + 1}^({m}) 1_{list(zeta)}", "probes": rep["probes"],
                             "coefficients_checked": rep["coefficients_checked"],
                             "verdict": rep["verdict"], "witness": rep["witness"]})
                ok &= rep["verdict"]
            if args.root_vectors:
                for m in range(1, args.m + 1):
                    try:
                        table = ctx.rank1_idiv_table(i, m, zeta)
                    except ModifiedError as err:
                        lines.append(f"root vectors at node {i + 1} skipped: {err}")
                        break
                    for beta, x in table:
                        rep = ctx.integrality_test(x)
                        rows.append({"element": f"B_{list(beta)}^({m}) 1_{list(zeta)}", "probes": rep["probes"],
                                     "coefficients_checked": rep["coefficients_checked"],
                                     "verdict": rep["verdict"], "witness": rep["witness"]})
                        ok &= rep["verdict"]
    for r in rows:
        lines.append(f"  {r['element']}: {'PASS' if r['verdict'] else 'FAIL'} "
                     f"({r['coefficients_checked']} coefficients over {len(r['probes'])} probes)")
    return {"suite": "integral", "m": args.m, "params": spec, "param_values": _params_json(params),
            "ring": "Abar", "reports": rows, "pass": ok}, lines


SUITES = {"pbw": _verify_pbw, "quasik": _verify_quasik, "integral": _verify_integral}


def cmd_verify(args) -> tuple:
    sd = load_satake(args)
    report, lines = SUITES[args.suite](args, sd)
    report["satake"] = sd.describe()
    lines.insert(0, f"verify {args.suite} on {sd.name}")
    lines.append("PASS" if report["pass"] else "FAIL")
    return report, lines, EXIT_OK if report["pass"] else EXIT_FAIL


# -- entry point --------------------------------------------------------------------------

def _add_satake_args(p):
    g = p.add_argument_group("Satake datum")
    g.add_argument("--builtin", help=f"builtin name: {', '.join(BUILTINS)}")
    g.add_argument("--satake", metavar="FILE", help="JSON file {type, rank?, black, tau}")
    g.add_argument("--type", help="Cartan type, e.g. A3 or B")
    g.add_argument("--rank", type=int, help="rank when --type has no digits")
    g.add_argument("--black", default="", help="black nodes, 1-based, comma separated")
    g.add_argument("--tau", default="id", help="'id' or pairs such as 1-3,2-4")
    p.add_argument("--output", metavar="PATH", help="write the JSON report here ('-' for stdout)")


def _positive(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iqpbw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("roots", help="positive roots split by the Satake datum")
    _add_satake_args(p)
    p.set_defaults(func=cmd_roots)
    p = sub.add_parser("rootvec", help="root vectors B_beta with their leading terms")
    _add_satake_args(p)
    p.add_argument("--cap", type=_positive, default=14, help="largest quasi K-matrix cutoff")
    p.set_defaults(func=cmd_rootvec)
    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    _add_satake_args(p)
    p.add_argument("--degree", type=_positive, default=4, help="filtration degree cap (pbw)")
    p.add_argument("--max-monomials", type=_positive, default=MAX_MONOMIALS, help="monomial limit (pbw)")
    p.add_argument("--cutoff", type=_positive, default=6, help="quasi K-matrix cutoff (quasik)")
    p.add_argument("--m", type=_positive, default=4, help="largest divided power (integral)")
    p.add_argument("--cap", type=_positive, default=14, help="largest quasi K-matrix cutoff for root vectors")
    p.add_argument("--params", default="diamond", help="'diamond', 'q^a*diamond' or 'q^[a1,...]*diamond'")
    p.add_argument("--no-root-vectors", dest="root_vectors", action="store_false",
                   help="skip divided root vectors (integral)")
    p.set_defaults(func=cmd_verify)
    return parser


def _emit(report: dict, lines: list, args, started: float):
    report = {"schema": SCHEMA, "command": args.command, **report,
              "elapsed_seconds": round(time.time() - started, 3)}
    if args.output == "-":
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
        return
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(report, fh, indent=2)
    for line in lines:
        print(line)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.time()
    try:
        report, lines, code = args.func(args)
    except SatakeError as err:
        report, lines, code = {"error": "invalid_satake", "condition": err.condition, "message": str(err),
                               "pass": False}, [f"invalid Satake datum: {err}"], EXIT_SATAKE
    except (UsageError, ParameterError) as err:
        report, lines, code = {"error": "usage", "message": str(err), "pass": False}, \
            [f"error: {err}"], EXIT_SATAKE
    except StabilizationError as err:
        report, lines, code = {"error": "stabilization", "message": str(err),
                               "roots": [list(b) for b in err.roots], "pass": False}, \
            [f"stabilization failure: {err}; roots {[list(b) for b in err.roots]}"], EXIT_STABILIZATION
    except ResourceCapError as err:
        report, lines, code = {"error": "resource_cap", "message": str(err), "pass": False}, \
            [f"resource cap exceeded: {err}"], EXIT_RESOURCE
    report["exit_code"] = code
    _emit(report, lines, args, started)
    return code


if __name__ == "__main__":
    sys.exit(main())
