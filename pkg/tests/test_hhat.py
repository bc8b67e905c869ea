import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gibbsfactor import (CaseMismatch, PointClass, TwoBlockPotential, UndefinedAtPoint,
                         UndefinedBranch, additivity_report, build_hhat, classify_factor,
                         h_table, point_class, ratio_potential_estimates, sandwich_check, words)
from gibbsfactor.hhat import _window_extremes

from conftest import ROWS, make_factor

import numpy as np

LOG2 = math.log(2)


# ---- point classes

@pytest.mark.parametrize("word,tail,label", [
    ("21", None, "[21]"),
    ("2221", None, "[2^3 1]"),
    ("1221", None, "[1 2^2 1]"),
    ("1112", None, "[1^3 2]"),
    ("22", 2, "2^inf"),
    ("1", 2, "12inf"),
    ("11", 1, "1^inf"),
    ("22", 1, "[2^2 1]"),
])
def test_point_class(word, tail, label):
    cls = point_class(word, tail)
    assert cls.label() == label or cls.kind == label


def test_point_class_needs_tail():
    with pytest.raises(ValueError):
        point_class("122")


# ---- classification

def test_classification_sys_a(sys_a):
    cls = classify_factor(*sys_a)
    assert cls.case == "(ii)-continuous" and cls.variant == "hhat1"
    assert cls.continuity["2^inf"] == "continuous"


def test_classification_sys_b(sys_b):
    cls = classify_factor(*sys_b)
    assert (cls.case, cls.variant) == ("(ii)-continuous", "hhat")
    assert any("= 1" in c for c in cls.conditions)
    assert cls.continuity["12^inf"] == "continuous"


def test_classification_sys_c(sys_c):
    cls = classify_factor(*sys_c)
    assert cls.case == "(iii)-symmetric-antidiagonal"
    assert (cls.jordan.a1, cls.jordan.a2) == (1, 1)
    assert cls.continuity["2^inf"] == "continuous"


def test_classification_sys_d(sys_d):
    cls = classify_factor(*sys_d)
    assert (cls.case, cls.variant) == ("antidiagonal-measurable", "hhat2")
    assert cls.continuity["2^inf"].startswith("discontinuous")
    assert not cls.is_open


def test_open_asymmetric_antidiagonal():
    fs = make_factor(ROWS["C"])
    f = TwoBlockPotential.from_weights(fs.domain, {(1, 2): 2, (2, 1): 3})
    cls = classify_factor(fs, f)
    assert cls.case == "open-antidiagonal-asymmetric" and cls.is_open
    assert cls.continuity["2^inf"] == "unknown; left open"


def test_tail_criterion_with_unequal_entries():
    # a1 = 2, a2 = 1 and a2 xbar^2 = a1 ybar^2 with xbar = 2, ybar = sqrt(2) is irrational,
    # so use xbar = 4, ybar = 2 * sqrt(2)... instead pick a1 = 8, a2 = 2, xbar = 2, ybar = 1
    fs = make_factor(ROWS["C"])
    f = TwoBlockPotential.from_weights(fs.domain, {(2, 3): 8, (3, 2): 2, (2, 1): 2})
    cls = classify_factor(fs, f)
    assert cls.case == "antidiagonal-measurable"
    assert cls.limits.tail_2n1.exists
    assert cls.limits.tail_2n1.ratio == 4


# ---- values

def test_sys_a_values(sys_a):
    pp = build_hhat(*sys_a)
    assert pp.variant == "hhat1"
    assert pp.eval("21") == pytest.approx(LOG2, abs=1e-15)
    for word in ("2221", "1221", "121"):
        assert pp.eval(word) == 0
    assert pp.eval("2", 2) == 0
    assert pp.eval(PointClass("12inf")) == 0


def test_sys_b_values(sys_b):
    pp = build_hhat(*sys_b, N=16)
    assert pp.variant == "hhat"
    assert pp.eval("2221") == pytest.approx(math.log(4 / 3), abs=1e-15)
    for n in range(2, 40):
        assert pp.eval((2,) * n + (1,)) == pytest.approx(math.log((n + 1) / n), rel=1e-12)
        assert pp.eval((1,) + (2,) * n + (1,)) == pytest.approx(math.log(n / (n + 1)), rel=1e-12)
    assert pp.eval("2", 2) == 0 and pp.eval("1", 2) == 0


def test_sys_d_values(sys_d):
    pp = build_hhat(*sys_d)
    assert pp.variant == "hhat2"
    assert pp.eval("2", 2) == pytest.approx(LOG2 / 2, abs=1e-15)
    assert pp.eval("12", 2) == pytest.approx(LOG2 / 2, abs=1e-15)
    with pytest.raises(UndefinedAtPoint):
        build_hhat(*sys_d, variant="hhat").eval("2", 2)


def test_vacuous_branch_on_golden_mean(sys_a):
    pp = build_hhat(*sys_a)
    with pytest.raises(UndefinedBranch):
        pp.eval("1112")
    assert "vacuous" in pp.to_text()


def test_full_shift_has_f11_branch(full32):
    pp = build_hhat(*full32)
    assert pp.eval("1112") == 0
    assert pp.eval("1", 1) == 0


def test_hhat2_needs_antidiagonal(sys_a):
    with pytest.raises(CaseMismatch):
        build_hhat(*sys_a, variant="hhat2")


def test_listing_text(sys_b, sys_d):
    text = build_hhat(*sys_b, N=5).to_text()
    assert "[2^3 1]: log(4/3)" in text
    assert "[1 2^2 1]: log(2/3)" in text
    text = build_hhat(*sys_d, N=5).to_text()
    assert "1/2 log(2)" in text and "override" in text


# ---- Birkhoff intervals

def test_interval_sys_a(sys_a):
    # after a final 1 the future no longer matters; after a final 2 it is 21 or 2^inf
    pp = build_hhat(*sys_a)
    for n in range(1, 9):
        for w in words(sys_a[0].codomain, n):
            lo, hi = pp.birkhoff_interval(w)
            if w[-1] == 1:
                assert lo == hi
            else:
                assert hi - lo == pytest.approx(LOG2, abs=1e-15)


def test_interval_brackets_every_extension(sys_b):
    pp = build_hhat(*sys_b)
    w = (1, 2, 2, 1, 2, 1)
    lo, hi = pp.birkhoff_interval(w)
    assert lo <= hi
    for ext in words(sys_b[0].codomain, 6):
        if w[-1] == 1 and ext[0] == 1:
            continue
        s = sum(pp.eval(w[i:] + ext, 2) for i in range(len(w)))
        assert lo - 1e-12 <= s <= hi + 1e-12


def test_interval_contains_point_sums(sys_b):
    pp = build_hhat(*sys_b)
    w = (2,) * 5
    lo, hi = pp.birkhoff_interval(w)
    # S_5 at 2^s 1 is log((s+1)/(s-4)): log 6 at s = 5, tending to 0
    assert (lo, hi) == pytest.approx((0.0, math.log(6)), abs=1e-12)
    for s in range(5, 60):
        total = sum(pp.eval((2,) * (s - i) + (1,)) for i in range(5))
        assert lo - 1e-12 <= total <= hi + 1e-12
    at_inf = pp.birkhoff_sum(w, 2)
    assert lo - 1e-12 <= at_inf <= hi + 1e-12


def test_window_extremes_periodic_and_monotone():
    vals = np.array([1.0, 2.0] * 10)
    assert _window_extremes(vals, None) == (1.0, 2.0)
    vals = 1.0 / np.arange(1, 21)
    assert _window_extremes(vals, 0.0) == (0.0, 1.0)


# ---- cross-module consistency

def test_continuity_matches_ratio_estimates(sys_b, sys_d):
    tb = h_table(*sys_b, 16)
    assert classify_factor(*sys_b).continuity["2^inf"] == "continuous"
    assert ratio_potential_estimates(tb, (2,) * 16, depths=range(8, 17), tol=1e-2).flag == "converged"
    td = h_table(*sys_d, 16)
    assert classify_factor(*sys_d).continuity["2^inf"].startswith("discontinuous")
    assert ratio_potential_estimates(td, (2,) * 16, depths=range(8, 17)).flag == "oscillating"


def test_hhat2_ratio_constants(sys_d):
    """Ratios h_k / exp(S_k hhat2) along 2^inf: 3/2 at even k, sqrt(2) at odd k."""
    fs, f = sys_d
    pp = build_hhat(fs, f)
    h = h_table(fs, f, 21)
    for k in range(1, 11):
        even = float(h[(2,) * (2 * k)]) / math.exp(pp.birkhoff_sum((2,) * (2 * k), 2))
        odd = float(h[(2,) * (2 * k + 1)]) / math.exp(pp.birkhoff_sum((2,) * (2 * k + 1), 2))
        assert even == pytest.approx(1.5, rel=1e-12)
        assert odd == pytest.approx(math.sqrt(2), rel=1e-12)


# ---- properties

weights = st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=6)


@given(a=weights, z=weights, w=weights, xb=weights, yb=weights)
def test_variant_equivalence_on_scalar_blocks(a, z, w, xb, yb):
    """exp(S_n hhat - S_n hhat1) is 1, or (z+w)(xbar+ybar)/(2(xbar z+ybar w)) when 12^inf is hit."""
    fs = make_factor(ROWS["A"])
    f = TwoBlockPotential.from_weights(fs.domain, {(2, 2): a, (3, 3): a, (1, 2): z, (1, 3): w,
                                                   (2, 1): xb, (3, 1): yb})
    p1 = build_hhat(fs, f, N=8)
    p0 = build_hhat(fs, f, N=8, variant="hhat")
    const = float((z + w) * (xb + yb) / (2 * (xb * z + yb * w)))
    for n in range(1, 7):
        for y in words(fs.codomain, n):
            for tail in (1, 2):
                if y[-1] == 1 and tail == 1:
                    continue
                r = math.exp(p0.birkhoff_sum(y, tail) - p1.birkhoff_sum(y, tail))
                hits = any(point_class(y[i:], tail).kind == "12inf" for i in range(n))
                assert r == pytest.approx(const if hits else 1.0, rel=1e-9)


@st.composite
def scaled_sys(draw):
    name = draw(st.sampled_from(["A", "B", "C"]))
    fs = make_factor(ROWS[name])
    c = draw(weights)
    return fs, c


@settings(max_examples=20)
@given(scaled_sys())
def test_log_ratio_is_scale_equivariant(data):
    """Scaling every weight by c moves log h_k - S_k hhat by exactly -log c for k >= 2.

    h_1 carries one factor of c through the tail rule, so k = 1 does not move.
    """
    fs, c = data
    f1 = TwoBlockPotential.zero(fs.domain)
    fc = TwoBlockPotential.from_weights(fs.domain, {b: c for b in fs.domain.two_blocks()})
    p1, pc = build_hhat(fs, f1, N=12), build_hhat(fs, fc, N=12)
    h1, hc = h_table(fs, f1, 8), h_table(fs, fc, 8)
    for k in range(1, 9):
        shift = 0.0 if k == 1 else -math.log(c)
        for y, l1, lc in zip(h1.words(k), h1.logs[k - 1], hc.logs[k - 1]):
            lo1, hi1 = p1.birkhoff_interval(y)
            loc, hic = pc.birkhoff_interval(y)
            assert lc - hic == pytest.approx(l1 - hi1 + shift, abs=1e-9)
            assert lc - loc == pytest.approx(l1 - lo1 + shift, abs=1e-9)
