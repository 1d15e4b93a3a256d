"""Command-line front end.

Every subcommand prints a deterministic text report whose last line is
`RESULT: <key>=<value> ...`.  Exit codes: 0 success, 1 verification failure
or unproven goal, 2 usage error, 3 budget exhaustion.  Facet indices and
vertex indices are 0-based everywhere, matching the file formats.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import certificates
from .bfp import bfp_search, bfp_to_text, bfp_verify, parse_bfp, parse_chirotope
from .canonical import canonical_bytes
from .chirotope import (
    SearchBudgetExceeded,
    complete_search,
    diagram_partial_chirotope,
    diagram_ridge_groups,
    prove_nonpolytopal,
    sample_frontier,
    seed_is_justified,
    sort_with_parity,
)
from .complexes import (
    FacetListError,
    LatticeError,
    dual_facet_list,
    face_lattice,
    flag_vector,
    is_2simple,
    is_2simplicial,
    is_eulerian,
    parse_facet_list,
)
from .enumeration import classify
from .geomcert import embeddability_report, parse_points, verify_diagram, verify_fan

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

LONG_RUNNING_NOTE = (
    "this reproduction is far beyond desk scale (the reference computation"
    " took weeks of CPU time); pass --long-running to confirm"
)


def _result(**kv) -> None:
    print("RESULT: " + " ".join(f"{k}={v}" for k, v in kv.items()))


def _load_facets(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_facet_list(fh.read())


def _load_points(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_points(fh.read())


def _parse_seed(text: str):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise SystemExit(EXIT_USAGE) from None


def _base_index(text: str, count: int) -> int:
    tok = text[1:] if text.startswith(("F", "f")) else text
    try:
        base = int(tok)
    except ValueError:
        print(f"error: bad facet index {text!r}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE) from None
    if not 0 <= base < count:
        print(f"error: facet index {base} out of range", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return base


# --------------------------------------------------------------------------
# subcommands


def _cmd_check(args) -> int:
    fl = _load_facets(args.facets)
    lat = face_lattice(fl)
    fv = flag_vector(lat)
    two_simplicial = is_2simplicial(lat)
    two_simple = is_2simple(lat)
    eulerian, witness = is_eulerian(lat)
    print(f"flag vector: {fv}")
    print(f"2-simplicial: {'yes' if two_simplicial else 'no'}")
    print(f"2-simple: {'yes' if two_simple else 'no'}")
    print(f"Eulerian: {'yes' if eulerian else 'no'}")
    if not eulerian:
        print(f"  unbalanced interval: {witness}")
    ok = two_simplicial and two_simple and eulerian
    _result(
        flag_vector=str(fv).replace(" ", ""),
        two_simple="yes" if two_simple else "no",
        two_simplicial="yes" if two_simplicial else "no",
        eulerian="yes" if eulerian else "no",
        verdict="pass" if ok else "fail",
    )
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_enumerate(args) -> int:
    if args.n >= 11 and not args.long_running:
        print(f"error: n={args.n}: {LONG_RUNNING_NOTE}", file=sys.stderr)
        return EXIT_USAGE
    report = classify(args.n, m=args.m, budget=args.budget, jobs=args.jobs)
    for t in report.types:
        a, b, c, d, e = t.flag
        print(f"type: flag vector ({a},{b},{c},{d};{e}) p-vector {t.p}")
        if args.verbose:
            sys.stdout.write(t.facet_list.to_text())
    _result(n=args.n, status=report.status, types=len(report.types))
    return EXIT_OK if report.status == "COMPLETE" else EXIT_BUDGET


def _cmd_prove_nonpolytopal(args) -> int:
    fl = _load_facets(args.facets)
    if args.seed is not None:
        seed = _parse_seed(args.seed)
    else:
        seed = _default_seed(fl)
        if seed is None:
            print("error: no justified seed basis found; pass --seed", file=sys.stderr)
            return EXIT_USAGE
    cert = prove_nonpolytopal(fl, seed, args.sign)
    text = certificates.certificate_to_text(cert)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(f"seed: chi({','.join(map(str, seed))}) = {args.sign:+d}"
          f" ({'justified' if cert.seed_justified else 'unjustified'})")
    print(f"steps: {len(cert.steps)}  determined: {cert.determined}")
    print(f"verdict: {cert.verdict}")
    _result(verdict=cert.verdict, determined=cert.determined,
            justified="yes" if cert.seed_justified else "no")
    return EXIT_OK if cert.verdict == "CONTRADICTION" else EXIT_FAIL


def _default_seed(fl):
    """First basis in sorted order that the facet condition leaves free and
    the tetrahedron pattern justifies."""
    from itertools import combinations

    masks = fl.facets
    for basis in combinations(range(fl.n), 5):
        bmask = sum(1 << v for v in basis)
        if any(bmask & f == bmask for f in masks):
            continue
        if seed_is_justified(fl, basis):
            return basis
    return None


def _cmd_replay(args) -> int:
    fl = _load_facets(args.facets)
    with open(args.certificate, encoding="utf-8") as fh:
        text = fh.read()
    try:
        parsed = certificates.parse_certificate(text)
        certificates.replay(parsed, fl.to_sets())
    except certificates.CertificateError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        _result(verdict="invalid", reason="parse")
        return EXIT_FAIL
    except certificates.ReplayError as exc:
        print(f"replay error: {exc}", file=sys.stderr)
        _result(verdict="invalid", step=exc.step if exc.step is not None else "-")
        return EXIT_FAIL
    print(f"replayed {len(parsed.steps)} steps, verdict {parsed.verdict}")
    _result(verdict="valid", steps=len(parsed.steps), outcome=parsed.verdict)
    return EXIT_OK


def _cmd_diagram_chirotope(args) -> int:
    fl = _load_facets(args.facets)
    base = _base_index(args.base, len(fl.facets))
    cert = diagram_partial_chirotope(fl, base)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(certificates.certificate_to_text(cert))
    print(f"base facet F{base}: derived {cert.derived} of"
          f" {len(cert.chirotope.bases)} basis signs, verdict {cert.verdict}")
    _result(base=f"F{base}", derived=cert.derived,
            bases=len(cert.chirotope.bases), verdict=cert.verdict)
    return EXIT_OK if cert.verdict != "CONTRADICTION" else EXIT_FAIL


def _cmd_diagram_refute(args) -> int:
    fl = _load_facets(args.facets)
    base = _base_index(args.base, len(fl.facets))
    if args.full and not args.long_running:
        print(
            "error: refuting the entire frontier enumerates thousands of"
            " search nodes and runs a final-polynomial search on each;"
            f" expect hours of CPU time. {LONG_RUNNING_NOTE}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    cert = diagram_partial_chirotope(fl, base)
    groups = diagram_ridge_groups(fl, base)
    if args.full:
        try:
            out = complete_search(
                cert.chirotope, groups=groups, floor=args.floor,
                mode="frontier", node_budget=args.node_budget,
            )
        except SearchBudgetExceeded as exc:
            _result(base=f"F{base}", status="BUDGET", nodes=exc.outcome.nodes)
            return EXIT_BUDGET
        chosen = out.frontier
        print(f"frontier: {len(chosen)} nodes at floor {args.floor}")
    else:
        chosen = sample_frontier(
            cert.chirotope, groups=groups, floor=args.floor,
            count=args.samples, seed=args.sample_seed,
        )
        print(f"sampled {len(chosen)} frontier nodes at floor {args.floor}")
    refuted = 0
    missing = []
    for node in chosen:
        bcert = bfp_search(node.chirotope)
        if bcert is not None and bfp_verify(node.chirotope, bcert):
            refuted += 1
        else:
            missing.append(node.trail)
    print(f"refuted {refuted} of {len(chosen)} attempted frontier nodes")
    for trail in missing:
        print(f"  no final polynomial: trail {trail}")
    _result(base=f"F{base}", attempted=len(chosen), refuted=refuted)
    return EXIT_OK if refuted == len(chosen) else EXIT_FAIL


def _cmd_bfp(args) -> int:
    with open(args.chirotope, encoding="utf-8") as fh:
        pc = parse_chirotope(fh.read())
    if args.action == "search":
        cert = bfp_search(pc)
        if cert is None:
            print("no final polynomial")
            _result(found="no")
            return EXIT_FAIL
        text = bfp_to_text(cert)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        _result(found="yes", inequalities=len(cert.entries))
        return EXIT_OK
    with open(args.certificate, encoding="utf-8") as fh:
        cert = parse_bfp(fh.read())
    ok = bfp_verify(pc, cert)
    print(f"certificate {'valid' if ok else 'INVALID'}")
    _result(valid="yes" if ok else "no")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_verify_diagram(args) -> int:
    fl = _load_facets(args.facets)
    pc = _load_points(args.coords)
    base = _base_index(args.base, len(fl.facets))
    report = verify_diagram(pc, fl, base)
    sys.stdout.write(report.to_text())
    _result(verdict="pass" if report.verdict else "fail")
    return EXIT_OK if report.verdict else EXIT_FAIL


def _cmd_verify_fan(args) -> int:
    fl = _load_facets(args.facets)
    pc = _load_points(args.coords)
    report = verify_fan(pc, fl)
    sys.stdout.write(report.to_text())
    _result(verdict="pass" if report.verdict else "fail")
    return EXIT_OK if report.verdict else EXIT_FAIL


def _cmd_embed_report(args) -> int:
    fl = _load_facets(args.facets)
    report = embeddability_report(fl)
    sys.stdout.write(report.to_text())
    _result(
        simple_vertices=len(report.simple_vertices),
        facets_without_simple=len(report.facets_without_simple),
    )
    return EXIT_OK


def _cmd_dual(args) -> int:
    fl = _load_facets(args.facets)
    text = dual_facet_list(face_lattice(fl)).to_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    _result(status="ok")
    return EXIT_OK


def _cmd_canon(args) -> int:
    fl = _load_facets(args.facets)
    digest = canonical_bytes(fl.n, fl.facets).hex()
    print(f"canonical form: {digest}")
    _result(canonical=digest)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument wiring


def _build_parser() -> argparse.ArgumentParser:
    default_jobs = int(os.environ.get("POLYSPHERE_JOBS", "1"))
    top = argparse.ArgumentParser(
        prog="polysphere",
        description="enumeration and realizability analysis of"
        " 2-simple 2-simplicial 3-spheres",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="lattice and flag-vector checks")
    p.add_argument("facets")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("enumerate", help="classify spheres on n vertices")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="restrict the facet count")
    p.add_argument("--budget", type=float, default=None, help="time budget in seconds")
    p.add_argument("--jobs", type=int, default=default_jobs)
    p.add_argument("--long-running", action="store_true")
    p.add_argument("--verbose", action="store_true", help="print facet lists")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("prove-nonpolytopal", help="seeded sign propagation proof")
    p.add_argument("facets")
    p.add_argument("--seed", default=None, help="comma-separated 5-element basis")
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--out", default=None, help="certificate output path")
    p.set_defaults(func=_cmd_prove_nonpolytopal)

    p = sub.add_parser("replay", help="independently validate a certificate")
    p.add_argument("certificate")
    p.add_argument("facets")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("diagram-chirotope", help="rank-4 diagram sign propagation")
    p.add_argument("facets")
    p.add_argument("--base", required=True, help="base facet, e.g. F1 or 1")
    p.add_argument("--out", default=None, help="certificate output path")
    p.set_defaults(func=_cmd_diagram_chirotope)

    p = sub.add_parser(
        "diagram-refute", help="refute diagram completions by final polynomials"
    )
    p.add_argument("facets")
    p.add_argument("--base", required=True)
    p.add_argument("--floor", type=int, default=435)
    p.add_argument("--samples", type=int, default=10,
                   help="random frontier nodes to refute (default mode)")
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--full", action="store_true", help="refute every frontier node")
    p.add_argument("--long-running", action="store_true")
    p.set_defaults(func=_cmd_diagram_refute)

    p = sub.add_parser("bfp", help="final polynomial search / verification")
    p.add_argument("action", choices=("search", "verify"))
    p.add_argument("chirotope", help="partial chirotope file")
    p.add_argument("certificate", nargs="?", help="certificate file (verify)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bfp)

    p = sub.add_parser("verify-diagram", help="exact 3D diagram coordinate checks")
    p.add_argument("coords")
    p.add_argument("facets")
    p.add_argument("--base", required=True)
    p.set_defaults(func=_cmd_verify_diagram)

    p = sub.add_parser("verify-fan", help="exact 4D fan coordinate checks")
    p.add_argument("coords")
    p.add_argument("facets")
    p.set_defaults(func=_cmd_verify_fan)

    p = sub.add_parser("embed-report", help="structural facts for embeddability")
    p.add_argument("facets")
    p.set_defaults(func=_cmd_embed_report)

    p = sub.add_parser("dual", help="dual facet list")
    p.add_argument("facets")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_dual)

    p = sub.add_parser("canon", help="canonical form of a facet list")
    p.add_argument("facets")
    p.set_defaults(func=_cmd_canon)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "bfp" and args.action == "verify" and args.certificate is None:
        parser.error("bfp verify needs a certificate file")
    try:
        return args.func(args)
    except (FacetListError, LatticeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
