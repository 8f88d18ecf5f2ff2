"""Acceptance suite: one test per headline criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v`` (the verdicts are repeated in
the terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

import json
import os
import random
import sys
import time
from fractions import Fraction as F

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from acceptance_log import record  # noqa: E402
from randsys import SQ2, random_system  # noqa: E402

from arcstack import certificate, linalg  # noqa: E402
from arcstack.circle import FULL, Arc, ArcFunction, frac_part  # noqa: E402
from arcstack.cli import main as cli_main  # noqa: E402
from arcstack.equations import check_solution  # noqa: E402
from arcstack.kronecker import (audit_subarc, find_L, find_subarc, recertify,  # noqa: E402
                                subarc_length)
from arcstack.level_solver import plan_levels, solve_level  # noqa: E402
from arcstack.numbers import QuadNum, sqrt_upper  # noqa: E402
from arcstack.pipeline import (check_items, main_lemma_ok, run_stages, separation,  # noqa: E402
                               verify_main_lemma)
from arcstack.scenario import Scenario  # noqa: E402
from arcstack.stack_model import (RationalStack, StackBasisData, check_basis,  # noqa: E402
                                  report_ok, validate_stack)
from arcstack.transformer import (original_equation, stack_equation,  # noqa: E402
                                  star_containment)

HERE = os.path.dirname(__file__)
SCN = os.path.join(HERE, "..", "scenarios")
N_STACKS = 200
N_BRUTE = 100
N_SUBARC = 500


def _scenario(name, **kw):
    scn = Scenario.load(os.path.join(SCN, name))
    for k, v in kw.items():
        setattr(scn, k, v)
    return scn.validate()


@pytest.fixture(scope="module")
def systems():
    """N_STACKS random systems, built once and shared by criteria 1, 2 and 8."""
    out, seed = [], 0
    while len(out) < N_STACKS:
        out.append((seed,) + random_system(seed))
        seed += 1
    return out


# ---------------------------------------------------------------- 1

def test_criterion_1_random_stacks_solved(systems):
    t0 = time.time()
    solved, bad = 0, []
    for seed, res, rho, U, out in systems:
        s, b = res.stack, res.basis
        assert s.k1 <= 3 and len(s.levels()) <= 3 and len(s.A) <= 40
        plan = plan_levels(s, b, out.eps, rho.support())
        eq = stack_equation(s, b, out, plan.B)
        ok = True
        for n in plan.B[:2]:
            phi, _ = solve_level(plan, n, out.W, out.psi)
            if not check_solution(eq, n, phi):
                ok = False
        solved += ok
        if not ok:
            bad.append(seed)
    elapsed = time.time() - t0
    ok = solved >= N_STACKS and elapsed < 300
    record(1, ok, f"{solved}/{len(systems)} random stacks solved and checked "
                  f"(k1 <= 3, <= 3 bricks, |A| <= 40) in {elapsed:.0f}s; failures {bad[:5]}")
    assert ok


# ---------------------------------------------------------------- 2

def _json_roundtrip(obj, cls):
    return cls.from_json(json.loads(json.dumps(obj.to_json()))).to_json() == obj.to_json()


def test_criterion_2_matrix_roundtrip(systems):
    failures = []
    for seed, res, *_ in systems:
        b = res.basis
        T2 = b.T * b.T
        eye = [[T2 if i == j else 0 for j in range(len(b.M))] for i in range(len(b.M))]
        ok = (linalg.matmul(b.M, b.N) == eye and linalg.matmul(b.N, b.M) == eye
              and check_basis(res.stack, b) is None
              and _json_roundtrip(res.stack, RationalStack)
              and _json_roundtrip(b, StackBasisData))
        if not ok:
            failures.append(seed)
    ok = not failures
    record(2, ok, f"M N = N M = T^2 I, A = M C and JSON round trip on {len(systems)} bases; "
                  f"failures {failures[:5]}")
    assert ok


# ---------------------------------------------------------------- 3

def _near(s, center, slack):
    d = frac_part(s - center)
    return min(d, 1 - d) < slack


def brute_force_solution(stack, basis, out, n, n_tries=200000):
    """An n-solution of the brick equation found by scanning preimages, no subarc finder."""
    members = {m.name: m for m in stack.members()}
    Kn = stack.K[n]
    big = max(max(m.table[n].l1() for m in members.values()), F(Kn))
    g = out.eps / (4 * (len(basis.A_names) + 1) * big)
    x = {mu: out.psi[mu].center / Kn for mu in out.psi.support()}
    for i in reversed(range(stack.k1)):
        z = stack.zeta[i][n]
        brick = [members[h.name] for h in stack.bricks[(i, 0)]]
        lead = max(brick, key=lambda h: abs(h.table[n][z]))
        a = lead.table[n][z]

        def residual(h, xz):
            vec = h.table[n]
            return sum((vec[mu] * (xz if mu == z else x.get(mu, 0)) for mu in vec), F(0))

        shift = residual(lead, F(0))
        c = out.W[lead.name].center - shift
        for k in range(min(abs(int(a)), n_tries)):
            xz = (c + k) / a
            if all(_near(residual(h, xz), out.W[h.name].center,
                         out.eps / 2 - g * h.table[n].l1()) for h in brick):
                x[z] = xz
                break
        else:
            return None
    for m in members.values():
        for mu in m.table[n]:
            x.setdefault(mu, F(0))
    return ArcFunction({mu: Arc.centered(xm, g) for mu, xm in x.items()})


def test_criterion_3_transfer_by_brute_force():
    t0 = time.time()
    done, pairs, failures, seed = 0, 0, [], 10_000
    while done < N_BRUTE:
        res, rho, U, out = random_system(seed, max_bricks=3, one_layer=True, allow_const=False)
        s, b = res.stack, res.basis
        plan = plan_levels(s, b, out.eps, rho.support())
        n = plan.B[0]
        phi = brute_force_solution(s, b, out, n)
        ok = (phi is not None
              and star_containment(b, out, U) is None
              and bool(check_solution(stack_equation(s, b, out, plan.B), n, phi))
              and bool(check_solution(original_equation(s, b, rho, U, plan.B), n, phi)))
        if not ok:
            failures.append(seed)
        pairs += any(len(v) > 1 for v in s.bricks.values())
        done += 1
        seed += 1
    ok = not failures
    record(3, ok, f"{done} brute-force brick solutions ({pairs} with two-member bricks) "
                  f"all solve the original equation, "
                  f"star containment holds ({time.time() - t0:.0f}s); failures {failures[:5]}")
    assert ok


# ---------------------------------------------------------------- 4

def test_criterion_4_kronecker():
    eps = F(1, 10)
    thetas = [(SQ2,), (QuadNum(1, 1, 2), QuadNum(3, -1, 2))]
    certs = [(th, find_L(th, eps)) for th in thetas]
    recert = all(recertify(th, c, refine=4) for th, c in certs)

    rng = random.Random(4)
    theta = (QuadNum(1), QuadNum(0, F(1, 2), 2))
    eps_k = F(7, 1024)
    L = find_L(theta, eps_k).L
    norm = sqrt_upper(2)
    audited = 0
    for _ in range(N_SUBARC):
        a0 = rng.randrange(10 ** 6, 10 ** 9) * rng.choice([1, -1])
        a = (a0, round(a0 * float(theta[1])))
        center = (F(rng.randrange(1000), 1000), F(rng.randrange(1000), 1000))
        if rng.random() < 0.5:
            J = FULL
        else:
            width = F(3 * L, abs(a0)) + subarc_length(a0, eps_k, norm)
            J = Arc.centered(F(rng.randrange(10 ** 6), 10 ** 6), width * 2)
        K = find_subarc(a, J, center, eps_k, L, norm)
        inside = J.full or K.subset_of(J)
        audited += bool(inside and audit_subarc(a, K, center, eps_k))
    ok = recert and audited == N_SUBARC
    record(4, ok, f"L = {[c.L for _, c in certs]} at eps = 1/10 recertified at 4x step: {recert}; "
                  f"{audited}/{N_SUBARC} random subarcs pass the exact audit")
    assert ok


# ---------------------------------------------------------------- 5

def test_criterion_5_three_stage_items():
    t0 = time.time()
    hom = run_stages(_scenario("two_families.json", stages=3))
    items = check_items(hom)
    elapsed = time.time() - t0
    wanted = [str(k) for k in range(1, 8)]
    ok = (hom.depth == 3 and all(items[k][0] for k in wanted if k in items)
          and all(ok for ok, _ in items.values()) and elapsed < 600)
    record(5, ok, f"3-stage two-family run, items {sorted(items)} certified in {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------- 6

def test_criterion_6_five_stage_main_lemma():
    hom = run_stages(_scenario("two_families.json", stages=5))
    lemma = {f.name: main_lemma_ok(verify_main_lemma(hom, f.name))
             for f in hom.scenario.families}
    sep = separation(hom)
    ok = hom.depth == 5 and all(lemma.values()) and sep["d"][0] and sep["d0/d1"][0]
    record(6, ok, f"5 stages at levels {hom.t}: main lemma {lemma}, "
                  f"phi(d) != 0 {sep['d'][0]}, phi(d0) != phi(d1) {sep['d0/d1'][0]}")
    assert ok


# ---------------------------------------------------------------- 7

def _shift_arc(obj, frac=1024):
    a = Arc.from_json(obj)
    d = a.length / frac
    return Arc(a.lo + d, a.hi + d).to_json()


def _first_key(d):
    return next(iter(d))


PERTURBATIONS = {
    "phi endpoint": lambda c: c["stages"][0]["phi"].__setitem__(
        _first_key(c["stages"][0]["phi"]), _shift_arc(c["stages"][0]["phi"][_first_key(c["stages"][0]["phi"])])),
    "rho arc": lambda c: c["rho"][1].__setitem__(
        _first_key(c["rho"][1]), _shift_arc(c["rho"][1][_first_key(c["rho"][1])])),
    "delta": lambda c: c["delta"].__setitem__(1, str(F(c["delta"][1]) / 2)),
    "product Q": lambda c: c["Qp"].__setitem__(1, str(int(c["Qp"][1]) + 1)),
    "gamma": lambda c: c["stages"][0].__setitem__("gamma", str(F(c["stages"][0]["gamma"]) / 2)),
    "level": lambda c: c["stages"][0].__setitem__("n", c["stages"][0]["n"] + 1),
    "W arc": lambda c: c["stages"][0]["W"].__setitem__(
        _first_key(c["stages"][0]["W"]), _shift_arc(c["stages"][0]["W"][_first_key(c["stages"][0]["W"])])),
    "trace Q": lambda c: c["stages"][0]["trace"]["Q"][0].__setitem__(
        "arc", _shift_arc(c["stages"][0]["trace"]["Q"][0]["arc"], 3)),
    "index set": lambda c: c["scenario"].__setitem__("C", {"0": [99]}),
    "separation goal": lambda c: c["scenario"].__setitem__("d0", c["scenario"]["d1"]),
}


def test_criterion_7_certificates(tmp_path):
    names = sorted(f for f in os.listdir(SCN) if f.endswith(".json"))
    checked, undetected = [], []
    for name in names:
        out = tmp_path / name[:-5]
        code = cli_main(["run", os.path.join(SCN, name), "--out", str(out)])
        if code != 0:
            continue
        cert = certificate.load(out / "certificate.json")
        ok, witness = certificate.check(cert)
        checked.append((name, ok))
        for label, edit in PERTURBATIONS.items():
            bad = json.loads(json.dumps(cert))
            edit(bad)
            if certificate.check(bad)[0]:
                undetected.append((name, label))
    ok = len(checked) >= 3 and all(v for _, v in checked) and not undetected
    record(7, ok, f"check passes on {[n for n, v in checked if v]}; "
                  f"{len(PERTURBATIONS)} perturbation kinds per certificate, undetected {undetected}")
    assert ok


# ---------------------------------------------------------------- 8

def test_criterion_8_brickline_descent(systems):
    failures = []
    longest = 0
    for seed, res, *_ in systems:
        log = res.log
        G = len(res.basis.A_names) - res.stack.k0
        chained = all(a["G_rest"] == b["G"] for a, b in zip(log, log[1:]))
        descent = all(e["G_rest"] < e["G"] for e in log)
        ends = bool(log) and log[-1]["G_rest"] == 0 and log[0]["G"] == G
        bounded = len(log) <= max(1, G * G)
        longest = max(longest, len(log))
        if not (chained and descent and ends and bounded and report_ok(validate_stack(res.stack))):
            failures.append(seed)
    ok = not failures
    record(8, ok, f"brickline strictly shrinks the family and the log stays within |G|^2 "
                  f"on {len(systems)} builds (longest log {longest}); failures {failures[:5]}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
