"""Command-line front end.

    resolvent <command> --input <file> [--order grevlex|lex] [--max-depth N]
              [--degree-cap N] [--seed N] [--format json|text]

Commands: diagonalize, resolve, euler, fitting, check.  ``check`` takes a
report written by one of the other commands.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from typing import Any, Dict, List

from . import __version__
from .blowup import BlowupTower, determinantal_tower
from .charts import Chart, RingMap
from .diagonalize import DiagCert, verify_cert
from .errors import InputError, ResolventError, VerificationFailure
from .euler import GradedMatrix, euler_of_matrix, independence_harness
from .matrices import ComplexOnChart, MatrixHom, image_rank, matmul, pullback_hom
from .problem import ProblemFile, build_problem
from .resolve import Presentation, fitting_ideal, resolve_complex, torsion_check

COMMANDS = ("diagonalize", "resolve", "euler", "fitting", "check")


def _digest(report: Dict[str, Any]) -> str:
    body = {k: v for k, v in report.items() if k != "digest"}
    blob = json.dumps(body, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _tower_json(T: BlowupTower) -> dict:
    return {
        "blowups": T.blowups,
        "charts": len(T.leaves),
        "exceptionals": T.exceptional_labels(),
        "steps": [s.to_json() for s in T.steps],
    }


def _leaf_common(chart: Chart, m: RingMap, depth: int) -> dict:
    return {"chart": chart.to_json(), "map": m.to_json(), "depth": depth}


def cmd_diagonalize(P: ProblemFile) -> dict:
    name, phi = P.target((MatrixHom,))
    if not isinstance(phi, MatrixHom):
        raise InputError(f"object {name!r} is not a matrix")
    prm = P.params
    T = determinantal_tower(P.chart, phi, prm["max_depth"], prm["permutation"], prm["seed"])
    leaves = []
    for leaf in T.leaves:
        item = _leaf_common(leaf.chart, leaf.map, leaf.depth)
        item["certificate"] = leaf.cert.to_json()
        leaves.append(item)
    return {"object": name, "rank": image_rank(phi), "tower": _tower_json(T), "leaves": leaves}


def _as_complex(obj) -> ComplexOnChart:
    if isinstance(obj, ComplexOnChart):
        return obj
    if isinstance(obj, MatrixHom):
        return ComplexOnChart((obj,))
    if isinstance(obj, Presentation):
        return ComplexOnChart((obj.alpha,))
    raise InputError("resolve needs a matrix or a complex")


def cmd_resolve(P: ProblemFile) -> dict:
    name, obj = P.target((ComplexOnChart, MatrixHom))
    C = _as_complex(obj)
    prm = P.params
    R = resolve_complex(C, prm["max_depth"], prm["permutation"], prm["seed"])
    leaves = []
    for leaf in R.leaves:
        item = _leaf_common(leaf.chart, leaf.map, leaf.depth)
        item["certificates"] = [c.to_json() for c in leaf.certs]
        item["kernel"] = [[leaf.chart.fmt(e) for e in v] for v in leaf.kernel.vectors]
        leaves.append(item)
    return {
        "object": name,
        "ranks": C.ranks,
        "tower": _tower_json(R.tower),
        "h": list(R.h),
        "torsion": torsion_check(R),
        "leaves": leaves,
    }


def cmd_euler(P: ProblemFile) -> dict:
    name, M = P.target((GradedMatrix,))
    if not isinstance(M, GradedMatrix):
        raise InputError(f"object {name!r} is not a graded matrix")
    if P.geometry is None:
        raise InputError("euler needs a geometry stanza")
    prm = P.params
    res = euler_of_matrix(M, P.geometry, prm["degree_cap"], prm["permutation"])
    out = {"object": name}
    out.update(res.to_json())
    if prm.get("independence", True) and res.value is not None:
        out["independent"] = independence_harness(M, P.geometry, (0, 1), prm["degree_cap"])
    return out


def cmd_fitting(P: ProblemFile) -> dict:
    name, obj = P.target((Presentation, MatrixHom))
    pres = obj if isinstance(obj, Presentation) else Presentation(obj)
    chart = pres.alpha.chart
    ideals = []
    for h in range(pres.m + 1):
        J = fitting_ideal(pres, h)
        ideals.append({"h": h, "basis": [chart.fmt(g) for g in J.groebner(chart.order)]})
    return {"object": name, "m": pres.m, "fitting": ideals}


RUNNERS = {
    "diagonalize": cmd_diagonalize,
    "resolve": cmd_resolve,
    "euler": cmd_euler,
    "fitting": cmd_fitting,
}


def run(command: str, problem_raw: dict, overrides: Dict[str, Any] = None, timing: bool = False) -> dict:
    """Execute a command on a problem document and return the report."""
    P = build_problem(problem_raw, overrides)
    start = time.perf_counter()
    result = RUNNERS[command](P)
    report = {
        "tool": "resolvent",
        "version": __version__,
        "command": command,
        "params": {k: P.params[k] for k in sorted(P.params)},
        "problem": problem_raw,
        "result": result,
    }
    if timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    report["digest"] = _digest(report)
    return report


# -- check ---------------------------------------------------------------


def _check_leaves(P: ProblemFile, result: dict, command: str) -> int:
    root = P.chart
    if command == "diagonalize":
        terms = [P.objects[result["object"]]]
    else:
        terms = list(_as_complex(P.objects[result["object"]]).terms)
    n = len(terms)
    ranks = [t.cols for t in terms] + [terms[-1].rows]
    if not result["leaves"]:
        raise VerificationFailure("report has no leaves", reason="NoLeaves")
    hs = set()
    for item in result["leaves"]:
        chart = Chart.from_json(item["chart"], root.order)
        m = RingMap.make(root, chart, item["map"], check=True)
        certs = item["certificates"] if command == "resolve" else [item["certificate"]]
        if len(certs) != n:
            raise VerificationFailure(f"leaf {chart.name} has {len(certs)} certificates for {n} maps")
        ms = []
        for i, data in enumerate(certs):
            phi = pullback_hom(m, terms[i])
            cert = DiagCert.from_json(chart, data)
            verdict = verify_cert(phi, cert)
            if not verdict:
                raise VerificationFailure(f"leaf {chart.name} map {i}: {verdict.message}", reason=verdict.reason)
            ms.append(cert.rank)
        if command == "resolve":
            kernel = [[chart.parse(e) for e in v] for v in item["kernel"]]
            if len(kernel) != ranks[0] - ms[0]:
                raise VerificationFailure(f"leaf {chart.name}: kernel rank mismatch", reason="KernelRank")
            phi0 = pullback_hom(m, terms[0])
            for v in kernel:
                col = tuple((e,) for e in v)
                if any(x for row in matmul(chart, phi0.entries, col, len(v)) for x in row):
                    raise VerificationFailure(f"leaf {chart.name}: kernel vector not annihilated", reason="KernelMismatch")
            h = [ranks[0] - ms[0]] + [(ranks[i] - ms[i]) - ms[i - 1] for i in range(1, n)] + [ranks[n] - ms[n - 1]]
            hs.add(tuple(h))
    if command == "resolve":
        if len(hs) != 1 or list(hs.pop()) != result["h"]:
            raise VerificationFailure("cohomology ranks do not match the certificates", reason="RankMismatch")
    return len(result["leaves"])


def check_report(report: dict) -> dict:
    for key in ("command", "problem", "result", "params", "digest"):
        if key not in report:
            raise VerificationFailure(f"report lacks {key!r}", reason="Malformed")
    if _digest(report) != report["digest"]:
        raise VerificationFailure("digest does not match the report body", reason="DigestMismatch")
    command = report["command"]
    if command not in RUNNERS:
        raise VerificationFailure(f"cannot check command {command!r}", reason="Malformed")
    try:
        P = build_problem(report["problem"], report["params"])
        if command in ("diagonalize", "resolve"):
            count = _check_leaves(P, report["result"], command)
            return {"checked": command, "leaves_checked": count, "ok": True}
        fresh = RUNNERS[command](P)
    except VerificationFailure:
        raise
    except (ResolventError, KeyError, TypeError, IndexError, ValueError) as exc:
        raise VerificationFailure(f"report content does not re-verify: {exc}", reason="Malformed") from exc
    if fresh != report["result"]:
        raise VerificationFailure("recomputed result differs from the report", reason="ResultMismatch")
    return {"checked": command, "ok": True}


# -- rendering --------------------------------------------------------------


def render_text(report: dict) -> str:
    lines: List[str] = []
    cmd = report.get("command")
    r = report.get("result", {})
    lines.append(f"resolvent {report.get('version', '')} :: {cmd}")
    if "object" in r:
        lines.append(f"object      {r['object']}")
    if "tower" in r:
        t = r["tower"]
        lines.append(f"blowups     {t['blowups']}")
        lines.append(f"leaves      {t['charts']}")
        for s in t["steps"]:
            lines.append(f"  {s['label']:<6} on {s['chart']:<20} center ({', '.join(s['center'])})")
    if "h" in r:
        lines.append(f"h^i         {' '.join(str(h) for h in r['h'])}")
        lines.append(f"torsion     {'yes' if r['torsion'] else 'no'}")
    for leaf in r.get("leaves", []):
        ch = leaf["chart"]
        certs = leaf.get("certificates") or [leaf.get("certificate")]
        diag = "; ".join(", ".join(c["diag"]) or "-" for c in certs)
        lines.append(f"  {ch['name']:<24} vars {','.join(ch['vars']):<20} diag [{diag}]")
        if leaf.get("kernel"):
            lines.append(f"  {'':<24} kernel {' '.join('(' + ', '.join(v) + ')' for v in leaf['kernel'])}")
    if cmd == "euler":
        lines.append(f"geometry    {r['geometry']}")
        lines.append(f"kernel rank {r['kernel_rank']}")
        if "twists" in r:
            lines.append(f"twists      {r['twists']}")
        if "multiplicities" in r:
            lines.append(f"base mults  {r['multiplicities']}")
        lines.append(f"euler       {r['euler']}")
        if "independent" in r:
            lines.append(f"independent {'yes' if r['independent'] else 'NO'}")
    if cmd == "fitting":
        for item in r["fitting"]:
            lines.append(f"J_{item['h']:<9} ({', '.join(item['basis']) or '0'})")
    if "checked" in r:
        extra = f" ({r['leaves_checked']} leaves)" if "leaves_checked" in r else ""
        lines.append(f"check       {r['checked']} ok{extra}")
    if report.get("digest"):
        lines.append(f"digest      {report['digest']}")
    return "\n".join(lines) + "\n"


def _emit(doc: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(render_text(doc))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="resolvent", description="Resolve matrices and complexes over affine charts by blowups.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", "-i", required=True, help="problem file (or a report, for check)")
    ap.add_argument("--order", choices=("grevlex", "lex"))
    ap.add_argument("--max-depth", type=int)
    ap.add_argument("--degree-cap", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--permutation", type=int, help="rotate center generator order")
    ap.add_argument("--target", help="object to operate on")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    ap.add_argument("--timing", action="store_true", help="include wall time (breaks byte determinism)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        if args.command == "check":
            try:
                with open(args.input, encoding="utf-8") as fh:
                    report = json.load(fh)
            except OSError as exc:
                raise InputError(f"cannot read report {args.input}: {exc.strerror}") from exc
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                raise VerificationFailure(f"report {args.input} is not valid JSON: {exc}", reason="Unreadable") from exc
            if not isinstance(report, dict):
                raise InputError("report must be a JSON object")
            doc = {"tool": "resolvent", "version": __version__, "command": "check", "result": check_report(report)}
        else:
            overrides = {
                "order": args.order,
                "max_depth": args.max_depth,
                "degree_cap": args.degree_cap,
                "seed": args.seed,
                "permutation": args.permutation,
                "target": args.target,
            }
            try:
                with open(args.input, encoding="utf-8") as fh:
                    raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"{args.input}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
            except OSError as exc:
                raise InputError(f"cannot read {args.input}: {exc.strerror}") from exc
            doc = run(args.command, raw, overrides, args.timing)
        _emit(doc, args.format, out)
        return 0
    except ResolventError as exc:
        err = {"error": {"reason": exc.context.get("reason", exc.reason), "message": str(exc)}}
        ctx = {k: v for k, v in exc.context.items() if k != "reason" and isinstance(v, (str, int))}
        if ctx:
            err["error"]["context"] = ctx
        if args.format == "json":
            out.write(json.dumps(err, indent=2) + "\n")
        print(f"error [{err['error']['reason']}]: {exc}", file=sys.stderr)
        return exc.exit_code
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
