"""Laurent-in-eps arithmetic and the two evaluation modes of the shifts."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gkzflop import (
    BranchCut,
    DeformationRing,
    EpsSeries,
    InfeasibleArgs,
    NotInvertible,
    UncancelledPole,
    build_sector_algebra,
    compute_box,
)
from gkzflop.deform import (
    TWO_PI_I,
    constant_series,
    principal_log,
    reciprocal_gamma_shifted,
    reciprocal_gamma_stripped,
    series_exp,
    series_inverse,
)


@pytest.fixture(scope="module")
def alg(a1):
    t = a1.t_plus
    gamma = compute_box(a1.data, t)[0]
    return build_sector_algebra(a1.data, t, gamma)


def eval_series(s, eps):
    acc = s.algebra.zero()
    for e in range(s.val, s.order):
        acc = acc + s.coeff(e) * (eps ** e)
    return acc


def eq_on_common(u, v, tol=1e-11):
    lo = max(u.val, v.val)
    hi = min(u.order, v.order)
    if hi <= lo:
        return True  # no shared window, nothing observable to disagree on
    return all((u.coeff(e) - v.coeff(e)).norm() <= tol for e in range(lo, hi))


def test_construction_trims_leading_zeros(alg):
    z = alg.zero()
    s = EpsSeries(alg, -2, [z, z, alg.one(), z])
    assert s.val == 0 and s.order == 2
    assert (s.coeff(0) - alg.one()).is_zero()
    assert s.coeff(-5).is_zero()
    assert s.shift(3).val == 3


def test_constant_series_window(alg):
    s = constant_series(alg, 3.0, 5)
    assert s.val == 0 and s.order == 5
    assert s.coeff(0).scalar_part == 3.0
    assert s.coeff(4).is_zero()
    assert s.principal_norm() == 0.0


series_vals = st.integers(-3, 3)


@st.composite
def small_series(draw, algebra_dim=2):
    val = draw(st.integers(-2, 2))
    coeffs = [[draw(series_vals) for _ in range(algebra_dim)]
              for _ in range(3)]
    return val, coeffs


@given(small_series(), small_series(), small_series())
def test_ring_axioms(alg, sa, sb, sc):
    def mk(spec):
        val, coeffs = spec
        return EpsSeries(alg, val, [alg.element(c) for c in coeffs])

    a, b, c = mk(sa), mk(sb), mk(sc)
    assert eq_on_common(a + b, b + a)
    assert eq_on_common((a + b) + c, a + (b + c))
    assert eq_on_common(a * b, b * a)
    assert eq_on_common((a * b) * c, a * (b * c))
    assert eq_on_common(a * (b + c), a * b + a * c)


def test_series_inverse_regular(alg):
    rng = np.random.default_rng(2)
    one = alg.one()
    for _ in range(20):
        coeffs = [alg.element(rng.standard_normal(2) + 1j * rng.standard_normal(2))
                  for _ in range(6)]
        coeffs[0] = coeffs[0] + 2.0
        x = EpsSeries(alg, 0, coeffs)
        p = x * series_inverse(x)
        assert (p.coeff(0) - one).norm() < 1e-11
        for e in range(1, p.order):
            assert p.coeff(e).norm() < 1e-10


def test_series_inverse_laurent_valuation(alg):
    t = alg.divisor(0)
    x = EpsSeries(alg, -1, [alg.scalar(2.0) + t, alg.one(), t])
    inv = series_inverse(x)
    assert inv.val == 1
    p = x * inv
    assert (p.coeff(0) - alg.one()).norm() < 1e-12
    for e in range(1, p.order):
        assert p.coeff(e).norm() < 1e-12


def test_series_inverse_rejects_nilpotent(alg):
    t = alg.divisor(0)
    x = EpsSeries(alg, 0, [t, t])
    with pytest.raises(NotInvertible):
        series_inverse(x)


def test_series_exp_pair(alg):
    rng = np.random.default_rng(4)
    coeffs = [alg.element(rng.standard_normal(2)) * 0.3 for _ in range(5)]
    x = EpsSeries(alg, 0, coeffs)
    p = series_exp(x) * series_exp(-x)
    assert (p.coeff(0) - alg.one()).norm() < 1e-12
    for e in range(1, p.order):
        assert p.coeff(e).norm() < 1e-11
    ident = series_exp(EpsSeries(alg, 4, []))
    assert (ident.coeff(0) - alg.one()).is_zero()


def test_ring_offset_validation(alg):
    with pytest.raises(InfeasibleArgs):
        DeformationRing(alg, offsets=(0, 1))
    with pytest.raises(InfeasibleArgs):
        DeformationRing(alg, offsets=(0, 1, 1))
    ring = DeformationRing(alg)
    assert ring.offsets == (Fraction(0), Fraction(1), Fraction(2))
    assert ring.laurent


def test_modes_agree_at_small_eps(alg):
    eps = 1e-3
    laurent = DeformationRing(alg, eps=None, window=8)
    numeric = DeformationRing(alg, eps=eps)

    def probe(ring):
        inv = ring.inv(ring.scalar(2.0) - ring.exp(ring.divisor(1) * (-1.0)))
        rg = ring.recip_gamma(-1, ring.divisor(1) * (1.0 / TWO_PI_I))
        bp = ring.branched_power(0.4 + 0.2j, ring.divisor(2) * (1.0 / TWO_PI_I))
        return inv * bp + rg

    want = probe(numeric)
    got = eval_series(probe(laurent), eps)
    assert (got - want).norm() <= 1e-10 * max(1.0, want.norm())


def test_eps_zero_and_principal(alg):
    ring = DeformationRing(alg, eps=None, window=6)
    pole = EpsSeries(alg, -1, [alg.one()] + [alg.zero()] * 3)
    assert ring.principal_ratio(pole) > 0.5
    with pytest.raises(UncancelledPole):
        ring.eps_zero(pole)
    cancelled = pole - EpsSeries(alg, -1, [alg.one(), alg.zero()])
    assert ring.principal_ratio(cancelled) == 0.0
    assert ring.eps_zero(cancelled).is_zero()
    val = ring.eps_zero(ring.one())
    assert (val - alg.one()).is_zero()
    assert ring.principal_ratio(alg.one()) == 0.0  # numeric values pass through


def test_principal_log_branch():
    assert abs(principal_log(1j) - 1j * math.pi / 2) < 1e-15
    with pytest.raises(BranchCut):
        principal_log(-2.0)
    with pytest.raises(BranchCut):
        principal_log(0.0)


def test_stripped_factor_restores_product(alg):
    t = alg.divisor(0) * (1.0 / TWO_PI_I)
    for z in (-1, -2, -3):
        full = reciprocal_gamma_shifted(z, t)
        back = t * reciprocal_gamma_stripped(z, t)
        assert (full - back).norm() < 1e-12
    ring = DeformationRing(alg, eps=None, window=6)
    d = ring.divisor(0) * (1.0 / TWO_PI_I)
    for z in (-1, -2):
        full = reciprocal_gamma_shifted(z, d)
        back = d * reciprocal_gamma_stripped(z, d)
        assert eq_on_common(full, back, 1e-11)


def test_stripped_factor_needs_negative_integer(alg):
    t = alg.divisor(0)
    with pytest.raises(AssertionError):
        reciprocal_gamma_stripped(Fraction(-1, 2), t)
