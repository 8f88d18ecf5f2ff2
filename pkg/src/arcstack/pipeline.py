"""The staged recursion and the partial homomorphism it produces.

Stage s works at level t_s (t_0 = 0, t_{s+1} = r(s)).  It builds a stack for
the families alive at t_s, rewrites the arc equation of rho^{t_s} over the
bricks, solves it at the least workable level n > t_s and refines the
solution into rho^{t_{s+1}}.  Indices in this module are stage indices s;
Qp[s] is the product of the K multipliers used to reach stage s, so that
phi(chi_xi / Qp[s]) lies in (Qp[s'] / Qp[s]) rho[s'](xi) for every s' >= s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .circle import Arc, ArcFunction, first_unrefined, int_scale, lin_comb
from .equations import check_solution, solution_length
from .errors import InternalAssertion, LevelFailed, ScenarioInvalid, StageFailed
from .level_solver import plan_levels, solve_level
from .oracle import FilterOracle
from .scenario import common_denominator
from .stack_builder import build_stack, chi_name
from .transformer import original_equation, star_containment, transform


@dataclass
class StageRecord:
    s: int
    t: int
    stack: object
    basis: object
    build_log: list
    delta: Fraction
    rho: ArcFunction
    U: dict
    C: set
    out: object = None          # TransformOutput
    plan: object = None         # LevelPlan
    n: int = None               # the chosen next level r(s)
    phi: ArcFunction = None
    trace: object = None
    failed: list = field(default_factory=list)

    @property
    def gamma(self):
        return self.plan.gamma[self.n]

    @property
    def K_step(self):
        return self.stack.K[self.n]


@dataclass
class PartialHom:
    scenario: object
    stages: list               # StageRecord per solved stage
    rho: list                  # rho[0..M]
    delta: list                # delta[0..M]
    t: list                    # t[0..M]
    C: list                    # C[0..M]
    Qp: list                   # Qp[0..M]
    items: dict = None

    @property
    def depth(self):
        return len(self.stages)

    @property
    def r(self):
        return self.t[1:]


# ---------------------------------------------------------------- stage 0

def _place(vec, target, centers):
    """Give the least index of vec the center that puts sum vec(mu) x_mu at target."""
    mu0 = min(vec.support())
    centers[mu0] = target / vec[mu0]


def separation_weights(scn):
    """Integer multiples of d and of (d0, d1); separating these separates the originals."""
    e = scn.d.scale(common_denominator(scn.d))
    den = common_denominator(scn.d0, scn.d1)
    return e, scn.d0.scale(den), scn.d1.scale(den)


def initial_delta_bound(scn):
    e, e0, e1 = separation_weights(scn)
    return min(Fraction(1, int(e.l1())), Fraction(1, int(e0.l1() + e1.l1())))


def initial_rho(scn, support, delta):
    """rho^0: the d-sum sits at 1/2 and the d0/d1 sums at 1/4 and 3/4."""
    e, e0, e1 = separation_weights(scn)
    centers = {}
    _place(e, Fraction(1, 2), centers)
    if e0.support() and e1.support():
        _place(e0, Fraction(1, 4), centers)
        _place(e1, Fraction(3, 4), centers)
    else:
        _place(e0 if e0.support() else e1, Fraction(1, 2), centers)
    return ArcFunction({mu: Arc.centered(centers.get(mu, 0), delta) for mu in sorted(support)})


def _weighted(vec, rho, scale=1):
    terms = [(vec[mu] * scale, rho[mu]) for mu in vec]
    return lin_comb(terms) if terms else None


def separation_ok(scn, rho, scale=1):
    """(d-sum avoids 0, d0/d1 sums have disjoint closures) on rho scaled by `scale`."""
    e, e0, e1 = separation_weights(scn)
    sd = _weighted(e, rho, scale)
    ok_d = not sd.closure_contains(0)
    s0, s1 = _weighted(e0, rho, scale), _weighted(e1, rho, scale)
    if s0 is None or s1 is None:
        other = s1 if s0 is None else s0
        ok_01 = not other.closure_contains(0)
    else:
        ok_01 = s0.closures_disjoint(s1)
    return ok_d, ok_01


# ---------------------------------------------------------------- schedule

def next_delta(n, Q, gamma) -> Fraction:
    """delta for the stage entered at level n, given the product Q reaching it."""
    return Fraction(1, 2 ** (n + 1)) / Q * min(gamma, Fraction(1))


def full_delta(m, K, gamma, B) -> Fraction:
    """The unrestricted schedule over all levels n <= m + 1.

    K maps (i, n) -> K^i_n, gamma maps (t, n) -> gamma^t_n and B maps t to
    the set B^t; every available entry in range is used.
    """
    denom = prod(k for (i, n), k in K.items() if i <= m + 1 and n <= m + 1)
    gs = [g for (t, n), g in gamma.items() if t < n <= m + 2 and n in B.get(t, ())]
    return Fraction(1, 2 ** (m + 2)) / denom * min(gs + [Fraction(1)])


def refine_rho(phi, support, delta):
    """A delta-arc function below phi: concentric on supp phi, centered at 0 elsewhere."""
    out = {}
    for mu in sorted(support):
        a = phi[mu]
        out[mu] = Arc.centered(a.center if not a.full else 0, delta)
    return ArcFunction(out)


def _targets(stack, fams, rho):
    U = {f.name: rho[f.xi] for f in fams}
    for nu in stack.nu:
        U[chi_name(nu)] = rho[nu]
    return U


# ---------------------------------------------------------------- run

def run_stages(scn, stages=None, horizon=None, seed=None, progress=None) -> PartialHom:
    scn.validate()
    M = stages or scn.stages
    oracle = FilterOracle(horizon=horizon or scn.horizon, min_size=scn.min_size,
                          seed=scn.seed if seed is None else seed, strategy=scn.strategy,
                          start=1)
    bound = initial_delta_bound(scn)
    delta = scn.delta0 if scn.delta0 is not None else bound / 2
    if not delta < bound:
        raise ScenarioInvalid(f"delta0 = {delta} does not separate; need < {bound}")

    t, window = 0, oracle.window
    fams = scn.families_at(0)
    built = build_stack([(f.name, f.spec) for f in fams], window, oracle, anchor=scn.anchor)
    C = scn.C_at(0)
    rho = initial_rho(scn, C | set(built.stack.nu), delta)
    records, rhos, deltas, ts, Cs, Qp = [], [rho], [delta], [0], [C], [1]
    for s in range(M):
        stack, basis = built.stack, built.basis
        U = _targets(stack, fams, rho)
        out = transform(basis, delta, U, rho, stack.nu)
        if star_containment(basis, out, U) is not None:
            raise InternalAssertion(f"stage {s}: transformed targets escape U")
        plan = plan_levels(stack, basis, out.eps, C | set(rho.support()))
        rec = StageRecord(s, t, stack, basis, built.log, delta, rho, U, C, out, plan)
        for n in plan.B:
            if n <= t:
                continue
            try:
                rec.phi, rec.trace = solve_level(plan, n, out.W, out.psi, out)
            except LevelFailed as exc:
                rec.failed.append((n, exc.reason))
                continue
            rec.n = n
            break
        if rec.n is None:
            raise StageFailed(s, f"no level of B above {t} solves; failures: {rec.failed[:3]}")
        n = rec.n
        eq = original_equation(stack, basis, rho, U, plan.B)
        verdict = check_solution(eq, n, rec.phi)
        if not verdict:
            raise InternalAssertion(f"stage {s}: transferred solution fails: {verdict.witness}")
        records.append(rec)
        if progress:
            progress(rec)

        Qp.append(Qp[-1] * rec.K_step)
        new_delta = next_delta(n, Qp[-1], rec.gamma)
        new_C = scn.C_at(n)
        fams = scn.families_at(n)
        nus = []
        if s + 1 < M:
            window = tuple(k for k in plan.B if k > n)
            built = build_stack([(f.name, f.spec) for f in fams], window, oracle,
                                anchor=scn.anchor)
            nus = built.stack.nu
        rho = refine_rho(rec.phi, set(rho.support()) | new_C | set(nus), new_delta)
        t, delta, C = n, new_delta, new_C
        rhos.append(rho)
        deltas.append(delta)
        ts.append(t)
        Cs.append(C)

    hom = PartialHom(scn, records, rhos, deltas, ts, Cs, Qp)
    hom.items = check_items(hom)
    bad = [k for k, v in hom.items.items() if not v[0]]
    if bad:
        raise InternalAssertion(f"recursion items fail: {bad}", hom.items)
    return hom


# ---------------------------------------------------------------- items 1)-7)

def _fam_ok(vec, coef, rho, target):
    s = _weighted(vec, rho, coef)
    return target.contains(0) if s is None else s.subset_of(target)


def check_items(hom: PartialHom, equations=None):
    """Replay the recursion items exactly; item -> (ok, first witness).

    ``equations`` optionally supplies the stage equations (s -> ArcEquation);
    by default they are rebuilt from the stage records.
    """
    scn, recs, rho, t = hom.scenario, hom.stages, hom.rho, hom.t
    M = len(recs)
    res = {}

    def note(item, ok, witness):
        if item not in res or res[item][0]:
            res[item] = (ok, None if ok else witness)

    ok_d, ok_01 = separation_ok(scn, rho[0])
    note("a", ok_d and ok_01, ("separation", ok_d, ok_01))
    for s, rec in enumerate(recs):
        eq = equations[s] if equations else original_equation(
            rec.stack, rec.basis, rec.rho, rec.U, rec.plan.B)
        v = check_solution(eq, rec.n, rec.phi)
        note("1", bool(v) and solution_length(rec.phi) == rec.gamma, (s, v.witness))
        note("2", first_unrefined(rho[s + 1], rec.phi) is None,
             (s, first_unrefined(rho[s + 1], rec.phi)))
        bound = Fraction(1, 2 ** (t[s] + 1))
        for s2 in range(s + 1):
            P = prod(r.K_step for r in recs[s2:s + 1])
            for xi, a in rho[s + 1].items():
                img = int_scale(P, a)
                note("3", img.subset_of(rho[s2][xi]) and not img.full and img.length <= bound,
                     (s2, s, xi))
        for f in scn.families_at(t[s]):
            vec = f.spec.eval(t[s + 1])
            note("4", _fam_ok(vec, rec.K_step, rho[s + 1], rho[s][f.xi]), (s, f.name))
            for s2 in range(s + 1):
                P = prod(r.K_step for r in recs[s2:s + 1])
                note("5", _fam_ok(vec, P, rho[s + 1], rho[s2][f.xi]), (s2, s, f.name))
        note("6", rho[s].support() <= rho[s + 1].support(), s)
    for s, rec in enumerate(recs):
        fams = scn.families_at(t[s])
        ok = all(rec.U[f.name] == rho[s][f.xi] for f in fams) and all(
            rec.U[chi_name(nu)] == rho[s][nu] for nu in rec.stack.nu)
        note("7", ok, s)
    for s in range(M + 1):
        arcs_ok = all(a.length == hom.delta[s] and not a.full for _, a in rho[s].items())
        note("delta-arcs", arcs_ok and hom.C[s] <= rho[s].support(), s)
    return res


# ---------------------------------------------------------------- evaluation

@dataclass
class Evaluation:
    arc: Arc
    low_precision: bool


def evaluate(hom: PartialHom, P, xi, stage) -> Evaluation:
    """Enclosure of phi(chi_xi / P) from the deepest stage, P dividing Qp[stage]."""
    P = int(P)
    if P < 1 or hom.Qp[stage] % P:
        raise ValueError(f"{P} does not divide the stage-{stage} product")
    if xi not in hom.rho[stage].support():
        raise ValueError(f"{xi} is not yet in the support at stage {stage}")
    M = hom.depth
    arc = int_scale(hom.Qp[M] // P, hom.rho[M][xi])
    return Evaluation(arc, arc.full)


def enclosure(hom: PartialHom, vec, scale=1):
    """Enclosure of phi(scale * vec) for an integer vector supported in rho[M]."""
    M = hom.depth
    terms = [(vec[mu] * scale, int_scale(hom.Qp[M], hom.rho[M][mu])) for mu in vec]
    return lin_comb(terms) if terms else None


def separation(hom: PartialHom):
    """Exact verdicts for phi(d) != 0 and phi(d0) != phi(d1) from the deepest arcs."""
    scn = hom.scenario
    e, e0, e1 = separation_weights(scn)
    sd = enclosure(hom, e)
    s0, s1 = enclosure(hom, e0), enclosure(hom, e1)
    d_ok = sd is not None and not sd.closure_contains(0)
    if s0 is None or s1 is None:
        other = s1 if s0 is None else s0
        d01_ok = other is not None and not other.closure_contains(0)
    else:
        d01_ok = s0.closures_disjoint(s1)
    return {"d": (d_ok, sd), "d0/d1": (d01_ok, s0, s1)}


@dataclass
class MainLemmaRow:
    stage: int
    contained: bool
    radius: Fraction
    bound: Fraction             # None when no bound applies at this stage
    within: bool


def verify_main_lemma(hom: PartialHom, fname, P=1, window=None):
    """Replay the containment chain for family `fname` with denominator P."""
    scn = hom.scenario
    fam = {f.name: f for f in scn.families}[fname]
    rows = []
    stages = window if window is not None else range(1, hom.depth + 1)
    for s in stages:
        if s < 1 or s > hom.depth:
            continue
        if fam.from_stage > hom.t[s - 1] or hom.Qp[s - 1] % P:
            continue
        if fam.xi not in hom.rho[s - 1].support():
            continue
        vec = fam.spec.eval(hom.t[s])
        outer = int_scale(hom.Qp[s - 1] // P, hom.rho[s - 1][fam.xi])
        coef = Fraction(hom.Qp[s], P)
        inner = _weighted(vec, hom.rho[s], coef)
        contained = outer.contains(0) if inner is None else inner.subset_of(outer)
        radius = outer.length if not outer.full else Fraction(1)
        bound = Fraction(1, 2 ** (hom.t[s - 2] + 1)) if s >= 2 else None
        within = bound is None or (not outer.full and radius <= bound)
        rows.append(MainLemmaRow(s, contained, radius, bound, within))
    return rows


def main_lemma_ok(rows) -> bool:
    return all(r.contained and r.within for r in rows)


__all__ = [
    "StageRecord", "PartialHom", "run_stages", "check_items", "evaluate", "enclosure",
    "separation", "verify_main_lemma", "main_lemma_ok", "full_delta", "next_delta",
    "initial_rho", "refine_rho", "separation_ok"
]
