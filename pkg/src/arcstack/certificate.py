"""Certificates: an exact JSON record of a run, and an independent checker.

Every rational is a "p/q" string and every arc is "lo=p/q hi=r/s".  The
checker re-derives what it can from the scenario (family values, brick laws,
transformed targets, arc lengths) and replays every containment with the
equation checker; nothing stored by the producer is trusted unchecked.
"""

from __future__ import annotations

import json
from fractions import Fraction
from types import SimpleNamespace

from .circle import Arc, ArcFunction
from .equations import check_solution, solution_length
from .errors import ArcStackError
from .kronecker import subarc_length
from .level_solver import eps_star_for
from .numbers import fmt_rat, parse_rat, sqrt_upper
from .pipeline import (PartialHom, StageRecord, check_items, initial_delta_bound,
                       initial_rho, main_lemma_ok, next_delta, refine_rho, separation,
                       verify_main_lemma)
from .scenario import Scenario
from .stack_builder import chi_name
from .stack_model import (RationalStack, StackBasisData, check_basis, report_ok,
                          first_failure, validate_stack)
from .transformer import (original_equation, stack_equation, star_containment,
                          transform)
from .vectors import SeqSpec

FORMAT = "arcstack-certificate/1"


def _arcs(d):
    return {str(k): a.to_json() for k, a in d.items()}


def emit(hom: PartialHom) -> dict:
    stages = []
    for rec in hom.stages:
        stages.append({
            "s": rec.s, "t": rec.t, "n": rec.n,
            "stack": rec.stack.to_json(), "basis": rec.basis.to_json(),
            "delta": fmt_rat(rec.delta), "eps": fmt_rat(rec.out.eps),
            "B": list(rec.plan.B), "L": rec.plan.L, "gamma": fmt_rat(rec.gamma),
            "D": sorted(rec.plan.D),
            "U": _arcs(rec.U), "W": _arcs(rec.out.W),
            "psi": rec.out.psi.to_json(), "phi": rec.phi.to_json(),
            "trace": {"x": {str(mu): fmt_rat(x) for mu, x in sorted(rec.trace.x.items())},
                      "Q": [{"i": i, "j": j, "arc": a.to_json()}
                            for (i, j), a in sorted(rec.trace.Q.items())]},
            "failed_levels": [[n, str(why)] for n, why in rec.failed],
        })
    sep = separation(hom)
    lemma = {f.name: [{"stage": r.stage, "contained": r.contained,
                       "radius": fmt_rat(r.radius),
                       "bound": None if r.bound is None else fmt_rat(r.bound)}
                      for r in verify_main_lemma(hom, f.name)]
             for f in hom.scenario.families}
    return {
        "format": FORMAT,
        "scenario": hom.scenario.to_json(),
        "t": hom.t, "Qp": [str(q) for q in hom.Qp],
        "delta": [fmt_rat(d) for d in hom.delta],
        "C": [sorted(c) for c in hom.C],
        "rho": [r.to_json() for r in hom.rho],
        "stages": stages,
        "items": {k: v[0] for k, v in hom.items.items()},
        "separation": {"d": sep["d"][0], "d0/d1": sep["d0/d1"][0]},
        "main_lemma": lemma,
    }


def write(cert, path):
    with open(path, "w") as fh:
        json.dump(cert, fh, indent=1)


# ---------------------------------------------------------------- checker

class CheckFailed(Exception):
    def __init__(self, where, witness=None):
        super().__init__(f"{where}: {witness}")
        self.where = where
        self.witness = witness


def _need(cond, where, witness=None):
    if not cond:
        raise CheckFailed(where, witness)


def _arcmap(obj):
    return {k: Arc.from_json(v) for k, v in obj.items()}


def _attach_laws(stack, basis, scn_specs):
    """Member laws rebuilt from the scenario: member = sum_f N[h][f] f / T^2."""
    T2 = basis.T * basis.T
    by_name = {m.name: m for m in stack.members()}
    for hi, h in enumerate(basis.C_names):
        spec = SeqSpec()
        for fi, f in enumerate(basis.A_names):
            if basis.N[hi][fi]:
                spec = spec + scn_specs[f].scale(Fraction(basis.N[hi][fi], T2))
        by_name[h].spec = spec


def _check_stage(scn, obj, rho, delta, prev_B):
    s = obj["s"]
    where = f"stage {s}"
    stack = RationalStack.from_json(obj["stack"])
    basis = StackBasisData.from_json(obj["basis"])
    t, n = obj["t"], obj["n"]
    fams = scn.families_at(t)
    specs = {f.name: f.spec for f in fams}
    for nu in stack.nu:
        specs[chi_name(nu)] = SeqSpec.const_unit(nu)
    _need(list(basis.A_names) == [f.name for f in fams] + [chi_name(nu) for nu in stack.nu],
          where + " family names", basis.A_names)
    for f in basis.A_names:
        for k in stack.A:
            _need(basis.A_tables[f][k] == specs[f].eval(k), where + " family values", (f, k))
    _need(min(stack.A) >= 1, where + " stack window starts at 1")
    _need(prev_B is None or set(stack.A) <= {k for k in prev_B if k > t},
          where + " stack window", None)
    _need(check_basis(stack, basis) is None, where + " basis identities",
          check_basis(stack, basis))
    _attach_laws(stack, basis, specs)
    rep = validate_stack(stack)
    _need(report_ok(rep), where + " stack conditions", first_failure(rep))

    U = _arcmap(obj["U"])
    for f in fams:
        _need(U[f.name] == rho[f.xi], where + " target arcs", f.name)
    for nu in stack.nu:
        _need(U[chi_name(nu)] == rho[nu], where + " target arcs", nu)
    _need(set(U) == set(basis.A_names), where + " target names")
    out = transform(basis, delta, U, rho, stack.nu)
    _need(out.eps == parse_rat(obj["eps"]), where + " eps")
    _need(_arcmap(obj["W"]) == out.W, where + " brick targets W")
    _need(ArcFunction.from_json(obj["psi"]) == out.psi, where + " psi")
    _need(star_containment(basis, out, U) is None, where + " sum of W inside U")

    B = tuple(obj["B"])
    _need(set(B) <= set(stack.A) and n in B and n > t, where + " level", n)
    members = [m for m in stack.members()]
    eps_star = eps_star_for(out.eps)
    biggest = max(max(m.table[n].l1() for m in members), Fraction(stack.K[n]))
    gamma = eps_star / ((len(basis.A_names) + 1) * biggest)
    _need(gamma == parse_rat(obj["gamma"]), where + " gamma")
    phi = ArcFunction.from_json(obj["phi"])
    _need(solution_length(phi) == gamma, where + " solution length")
    eq_c = stack_equation(stack, basis, out, B)
    v = check_solution(eq_c, n, phi)
    _need(v, where + " brick equation", v.witness)
    eq_a = original_equation(stack, basis, rho, U, B)
    v = check_solution(eq_a, n, phi)
    _need(v, where + " family equation", v.witness)

    # solver trace: x table matches phi, Q arcs nest and have the stated length
    x = {int(k): parse_rat(v) for k, v in obj["trace"]["x"].items()}
    _need(set(x) == set(phi.support()), where + " trace support")
    for mu, xm in x.items():
        _need(phi[mu] == Arc.centered(xm, gamma), where + " trace x", mu)
    norm = sqrt_upper(len(basis.A_names) + 1)
    Q = {(q["i"], q["j"]): Arc.from_json(q["arc"]) for q in obj["trace"]["Q"]}
    _need(set(Q) == set(stack.levels()), where + " trace levels")
    for (i, j), arc in Q.items():
        brick = stack.bricks[(i, j)]
        a0 = max(abs(m.table[n][stack.zeta[i][n]]) for m in brick)
        _need(arc.length == subarc_length(a0, eps_star / 2, norm), where + " Q length", (i, j))
        if j + 1 < stack.l[i]:
            _need(arc.subset_of(Q[(i, j + 1)]), where + " Q nesting", (i, j))
    for i in range(stack.k1):
        _need(Q[(i, 0)].center == x[stack.zeta[i][n]], where + " level coordinate", i)

    rec = StageRecord(s, t, stack, basis, [], delta, rho, U, set(), out,
                      SimpleNamespace(B=B, gamma={n: gamma}), n, phi)
    return rec, eq_a


def check(cert) -> tuple:
    """(True, None) or (False, witness).  Never raises on malformed input."""
    try:
        _check(cert)
    except CheckFailed as exc:
        return False, f"{exc.where}: {exc.witness}"
    except (ArcStackError, KeyError, TypeError, ValueError, IndexError,
            ZeroDivisionError, AttributeError) as exc:
        return False, f"malformed certificate: {type(exc).__name__}: {exc}"
    return True, None


def _check(cert):
    _need(cert.get("format") == FORMAT, "format", cert.get("format"))
    scn = Scenario.from_json(cert["scenario"]).validate()
    t = list(cert["t"])
    rho = [ArcFunction.from_json(r) for r in cert["rho"]]
    delta = [parse_rat(d) for d in cert["delta"]]
    stage_objs = cert["stages"]
    M = len(stage_objs)
    _need(M >= 1 and len(rho) == M + 1 and len(delta) == M + 1 and len(t) == M + 1,
          "stage counts")
    _need(t[0] == 0, "t[0]")
    expected0 = scn.delta0 if scn.delta0 is not None else initial_delta_bound(scn) / 2
    _need(delta[0] == expected0 and delta[0] < initial_delta_bound(scn), "delta[0]")
    C = [scn.C_at(tt) for tt in t]
    _need([sorted(c) for c in C] == cert["C"], "index sets C")

    # every rho is the canonical one: rho^0 from the goals, rho^(s+1) from phi_s
    nus = [set(obj["stack"]["nu"]) for obj in stage_objs] + [set()]
    _need(rho[0] == initial_rho(scn, C[0] | nus[0], delta[0]), "rho[0]")

    recs, eqs, prev_B, Qp = [], [], None, [1]
    for s, obj in enumerate(stage_objs):
        _need(obj["s"] == s and obj["t"] == t[s] and obj["n"] == t[s + 1], f"stage {s} levels")
        _need(parse_rat(obj["delta"]) == delta[s], f"stage {s} delta")
        rec, eq = _check_stage(scn, obj, rho[s], delta[s], prev_B)
        recs.append(rec)
        eqs.append(eq)
        prev_B = rec.plan.B
        Qp.append(Qp[-1] * rec.K_step)
        _need(delta[s + 1] == next_delta(rec.n, Qp[-1], rec.gamma), f"stage {s + 1} delta")
        _need(set(rec.stack.nu) <= rho[s].support(), f"stage {s} constant coordinates")
        support = set(rho[s].support()) | C[s + 1] | nus[s + 1]
        _need(rho[s + 1] == refine_rho(rec.phi, support, delta[s + 1]), f"rho[{s + 1}]")
    _need([str(q) for q in Qp] == cert["Qp"], "products Q")

    hom = PartialHom(scn, recs, rho, delta, t, C, Qp)
    items = check_items(hom, equations=eqs)
    for k, (ok, w) in items.items():
        _need(ok, f"item {k}", w)
    sep = separation(hom)
    _need(sep["d"][0], "separation phi(d) != 0")
    _need(sep["d0/d1"][0], "separation phi(d0) != phi(d1)")
    for f in scn.families:
        rows = verify_main_lemma(hom, f.name)
        _need(main_lemma_ok(rows), "main lemma chain", f.name)
    return hom


def load(path):
    with open(path) as fh:
        return json.load(fh)


__all__ = ["emit", "write", "load", "check", "CheckFailed", "FORMAT"]
