import random
from fractions import Fraction as F

import pytest

from arcstack.circle import FULL, Arc
from arcstack.errors import DependenceDetected, NotFound
from arcstack.kronecker import audit_subarc, find_L, find_subarc, recertify, torus_dist2
from arcstack.numbers import QuadNum

SQ2 = QuadNum(0, 1, 2)


def test_sqrt2_needs_length_one():
    assert find_L([SQ2], F(1, 10)).L == 1


def test_dependent_rejected():
    with pytest.raises(DependenceDetected):
        find_L([SQ2, SQ2 * 2], F(1, 10))


def test_two_dim_certified_and_recertified():
    theta = [QuadNum(1), SQ2]
    cert = find_L(theta, F(1, 4))
    assert cert.L >= 1
    assert recertify(theta, cert, refine=2)


def test_subarc_exact_single_multiplier():
    K = find_subarc([5], FULL, [F(9, 10)], F(1, 16), 1)
    assert K.length == F(1, 20)
    assert K.center == F(9, 50)
    assert audit_subarc([5], K, [F(9, 10)], F(1, 16))


def test_subarc_identity_multiplier():
    K = find_subarc([1], FULL, [F(3, 7)], F(1, 16), 1)
    assert K.center == F(3, 7)


def test_subarc_common_zero():
    K = find_subarc([12, 5], FULL, [0, 0], F(1, 10), 4)
    assert torus_dist2([12 * K.center, 5 * K.center], [0, 0]) < (2 * F(1, 10)) ** 2
    assert audit_subarc([12, 5], K, [0, 0], F(1, 10))


def test_subarc_needs_strict_order():
    with pytest.raises(ValueError):
        find_subarc([5, 5], FULL, [0, 0], F(1, 10), 4)


def test_subarc_inside_short_J():
    with pytest.raises(NotFound):
        find_subarc([3], Arc(0, F(1, 1000)), [F(1, 2)], F(1, 16), 1)


def test_random_subarcs_pass_audit():
    rng = random.Random(3)
    for _ in range(40):
        a0 = rng.randint(40, 400)
        a = (a0, rng.randint(1, a0 - 1))
        center = [F(rng.randint(0, 99), 100), F(rng.randint(0, 99), 100)]
        eps = F(1, 16)
        L = find_L([QuadNum(1), SQ2], eps).L
        K = find_subarc(a, FULL, center, eps, L)
        assert audit_subarc(a, K, center, eps)


@pytest.mark.parametrize("theta", [(QuadNum(1), SQ2), (QuadNum(1, 1, 2), QuadNum(3, -1, 2)),
                                   (QuadNum(1), SQ2 / 3)])
@pytest.mark.parametrize("eps", [F(1, 4), F(1, 8), F(1, 20)])
def test_tube_floor_skips_only_failing_lengths(theta, eps):
    from arcstack.kronecker import certify, speed_upper
    step = eps / (4 * speed_upper(theta))
    L = 1
    while not certify(theta, eps, L, step):
        L *= 2
    assert find_L(theta, eps).L == L
