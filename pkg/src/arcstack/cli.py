"""Command line: ``arcstack run <scenario> --out DIR`` and ``arcstack check <cert>``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import certificate
from .errors import (CapExceeded, DependenceDetected, HorizonExhausted, InternalAssertion,
                     ResourceError, ScenarioInvalid, StageFailed, Unsupported)
from .pipeline import run_stages, separation, verify_main_lemma
from .scenario import Scenario

log = logging.getLogger("arcstack")

EXIT_OK, EXIT_CHECK, EXIT_SCENARIO, EXIT_STAGE, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _bits(x):
    return max(x.numerator.bit_length(), x.denominator.bit_length())


def _log2(x):
    """x as 2^-k with k rounded down, for display only."""
    k = x.denominator.bit_length() - x.numerator.bit_length()
    return f"~2^-{k}"


def render_report(hom) -> str:
    scn = hom.scenario
    lines = [f"scenario: {scn.name}", f"stages: {hom.depth}   levels r: {hom.r}", ""]
    lines.append("stage  t     r(s)  k0 k1  bricks  |A|   |B|   L     delta bits  gamma bits")
    for rec in hom.stages:
        st = rec.stack
        lines.append(f"{rec.s:<6} {rec.t:<5} {rec.n:<5} {st.k0:<2} {st.k1:<3} "
                     f"{len(st.members()):<7} {len(st.A):<5} {len(rec.plan.B):<5} "
                     f"{rec.plan.L:<5} {_bits(rec.delta):<11} {_bits(rec.gamma)}")
    lines += ["", "recursion items:"]
    for k, (ok, w) in hom.items.items():
        lines.append(f"  {k:<11} {'PASS' if ok else 'FAIL ' + repr(w)}")
    sep = separation(hom)
    lines += ["", "separation:"]
    lines.append(f"  φ(d) ≠ 0: {'CERTIFIED' if sep['d'][0] else 'NOT CERTIFIED'}")
    lines.append(f"  φ(d0) ≠ φ(d1): {'CERTIFIED' if sep['d0/d1'][0] else 'NOT CERTIFIED'}")
    if scn.families:
        lines += ["", "convergence radii (P = 1):", "  family  stage  contained  radius      bound"]
        for f in scn.families:
            for row in verify_main_lemma(hom, f.name):
                bound = "-" if row.bound is None else f"2^-{row.bound.denominator.bit_length() - 1}"
                lines.append(f"  {f.name:<7} {row.stage:<6} {str(row.contained):<10} "
                             f"{_log2(row.radius):<11} {bound}")
    return "\n".join(lines) + "\n"


def render_svg(hom, max_rows=24) -> str:
    """Nested arcs per coordinate, each stage drawn at its own zoom around the center."""
    keys = sorted(hom.rho[0].support())[:max_rows]
    depth = len(hom.rho)
    w, row_h = 640, 14
    h = (len(keys) + 1) * row_h * depth + 20
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
           'font-family="monospace" font-size="10">']
    y = 14
    for mu in keys:
        out.append(f'<text x="4" y="{y}">index {mu}</text>')
        y += row_h
        for s in range(depth):
            a = hom.rho[s][mu]
            if a.full:
                continue
            c = float(hom.rho[s][mu].center)
            x0 = 60 + c * 560
            width = max(1.0, float(a.length) * 560)
            out.append(f'<rect x="{x0 - width / 2:.2f}" y="{y - 9}" width="{width:.2f}" '
                       f'height="8" fill="none" stroke="black"/>')
            out.append(f'<text x="4" y="{y}">s={s}</text>')
            y += row_h
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_run(args) -> int:
    try:
        scn = Scenario.load(args.scenario)
        if args.horizon is not None:
            scn.horizon = args.horizon
        if args.seed is not None:
            scn.seed = args.seed
        if args.stages is not None:
            scn.stages = args.stages
        scn.validate()
    except ScenarioInvalid as exc:
        print(f"scenario invalid: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    try:
        hom = run_stages(scn, progress=lambda r: log.info("stage %d solved at level %d", r.s, r.n))
    except (ScenarioInvalid, DependenceDetected, Unsupported) as exc:
        print(f"scenario invalid: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except HorizonExhausted as exc:
        print(f"HorizonExhausted: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except (StageFailed, ResourceError, CapExceeded) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except InternalAssertion as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    os.makedirs(args.out, exist_ok=True)
    cert = certificate.emit(hom)
    certificate.write(cert, os.path.join(args.out, "certificate.json"))
    report = render_report(hom)
    with open(os.path.join(args.out, "report.txt"), "w") as fh:
        fh.write(report)
    if args.svg:
        with open(os.path.join(args.out, "arcs.svg"), "w") as fh:
            fh.write(render_svg(hom))
    print(report, end="")
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        cert = certificate.load(args.cert)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_CHECK
    ok, witness = certificate.check(cert)
    if ok:
        q = int(cert["Qp"][-1])
        print(f"certificate OK: {len(cert['stages'])} stages, final product has {q.bit_length()} bits")
        return EXIT_OK
    print(f"certificate REJECTED: {witness}", file=sys.stderr)
    return EXIT_CHECK


def build_parser():
    p = argparse.ArgumentParser(prog="arcstack", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a scenario and write certificate and report")
    r.add_argument("scenario")
    r.add_argument("--out", required=True)
    r.add_argument("--stages", type=int)
    r.add_argument("--horizon", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--svg", action="store_true")
    r.set_defaults(func=cmd_run)
    c = sub.add_parser("check", help="re-verify a certificate")
    c.add_argument("cert")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
