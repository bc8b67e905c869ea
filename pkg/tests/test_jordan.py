import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gibbsfactor import (CaseMismatch, SettingCViolation, TwoBlockPotential, block_product,
                         closed_form, jordan2x2, pattern_value, ratio_limits, weight_matrices)
from gibbsfactor.errors import ZeroMatrix
from gibbsfactor.jordan import PATTERNS, AmbiguousCaseWarning, _power2, pattern_word

from conftest import make_factor

F = Fraction


def test_weight_matrices_examples(sys_a, sys_b, sys_d):
    wa = weight_matrices(*sys_a)
    assert wa.M22p.tolist() == [[1, 0], [0, 1]]
    assert (wa.z, wa.w, wa.xbar, wa.ybar) == (1, 1, 1, 1)
    wb = weight_matrices(*sys_b)
    assert wb.M22p.tolist() == [[1, 1], [0, 1]]
    assert (wb.z, wb.w, wb.xbar, wb.ybar) == (1, 0, 1, 1)
    assert weight_matrices(*sys_d).M22p.tolist() == [[0, 2], [1, 0]]
    assert wa.f11 is None


def test_weight_matrices_need_supported_shape(full32):
    fs, f = full32
    assert weight_matrices(fs, f).f11 == 1
    from gibbsfactor import build_factor, full_shift
    other = build_factor(full_shift(3), full_shift(2), [2, 1, 1])
    with pytest.raises(SettingCViolation):
        weight_matrices(other, TwoBlockPotential.zero(other.domain))


def test_block_products(sys_a, sys_b, sys_d):
    wa, wb, wd = (weight_matrices(*s) for s in (sys_a, sys_b, sys_d))
    for n in range(2, 31):
        assert block_product(wa, (2,) * n)[1] == 2
        assert block_product(wb, (2,) * n)[1] == n + 1
    for k in range(1, 12):
        assert block_product(wd, (2,) * (2 * k + 1))[1] == 2 * 2 ** k


def test_jordan_examples():
    rep = jordan2x2([[F(1), F(1)], [F(0), F(1)]])
    assert rep.case == "jordan-block" and rep.alpha == 1 and rep.basis == (1, 0, 0, 1)
    assert jordan2x2([[F(1), F(0)], [F(0), F(1)]]).case == "scalar-diagonal"
    assert jordan2x2(np.eye(2) * 3.5).case == "scalar-diagonal"
    rep = jordan2x2([[F(0), F(2)], [F(1), F(0)]])
    assert rep.case == "antidiagonal" and (rep.a1, rep.a2) == (2, 1)
    assert rep.eigenvalues == pytest.approx((math.sqrt(2), -math.sqrt(2)), abs=1e-15)


def test_jordan_distinct_and_diagonal():
    rep = jordan2x2([[F(2), F(1)], [F(1), F(2)]])
    assert rep.case == "distinct-diagonal"
    assert (rep.alpha_exact, rep.beta_exact) == (3, 1)
    rep = jordan2x2([[F(1), F(0)], [F(0), F(3)]])
    assert rep.alpha == 3 and rep.beta == 1
    np.testing.assert_allclose(rep.reconstruct(), [[1, 0], [0, 3]], atol=1e-12)


def test_jordan_rejects_zero_and_negative():
    with pytest.raises(ZeroMatrix):
        jordan2x2([[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        jordan2x2([[1, -1], [0, 1]])


def test_near_degenerate_float_warns():
    with pytest.warns(AmbiguousCaseWarning):
        rep = jordan2x2([[1.0, 1e-12], [0.0, 1.0]])
    assert rep.case == "scalar-diagonal" and rep.warning


def test_closed_form_examples(sys_a, sys_b):
    wa, wb = weight_matrices(*sys_a), weight_matrices(*sys_b)
    ra, rb = jordan2x2(wa.M22p), jordan2x2(wb.M22p)
    for n in range(0, 25):
        assert closed_form(rb, wb, "2^n", n + 2) == n + 3
        assert closed_form(rb, wb, "12^n", n + 2) == n + 2
        assert closed_form(ra, wa, "2^n", n + 2) == 2


def test_closed_form_case_mismatch(sys_a, sys_b):
    wa, wb = weight_matrices(*sys_a), weight_matrices(*sys_b)
    with pytest.raises(CaseMismatch):
        closed_form(jordan2x2(wa.M22p), wb, "2^n", 3)


def test_closed_form_rejects_short_runs(sys_b):
    wb = weight_matrices(*sys_b)
    with pytest.raises(ValueError):
        closed_form(jordan2x2(wb.M22p), wb, "2^n", 1)


def test_ratio_limits_examples(sys_a, sys_b, sys_d):
    wb = weight_matrices(*sys_b)
    lb = ratio_limits(jordan2x2(wb.M22p), wb)
    assert lb.at_2inf.value == 0 and lb.at_12inf.value == 0
    assert "!= 0" in lb.at_12inf.condition
    wa = weight_matrices(*sys_a)
    la = ratio_limits(jordan2x2(wa.M22p), wa)
    assert la.at_21.value == pytest.approx(math.log(2), abs=1e-15)
    assert la.at_2inf.value == 0 and la.at_12inf.value == 0 and la.tail_2n1.value == 0
    wd = weight_matrices(*sys_d)
    ld = ratio_limits(jordan2x2(wd.M22p), wd)
    assert not ld.at_2inf.exists
    assert "1.5" in ld.at_2inf.condition and "1.333" in ld.at_2inf.condition


def test_pattern_words():
    assert pattern_word("12^n1", 3) == (1, 2, 2, 2, 1)
    assert pattern_word("2^n", 2) == (2, 2)


# ---- properties

pos = st.fractions(min_value=F(1, 8), max_value=2, max_denominator=16)
nonneg = st.one_of(st.just(F(0)), pos)


@st.composite
def setting_c_weights(draw, case=None):
    """Weighted SYS-shaped factor whose fiber block hits a requested Jordan case."""
    rows = [[0, 1, 1], [1, 1, 1], [1, 1, 1]]
    kind = case or draw(st.sampled_from(["distinct", "jordan", "scalar", "antidiagonal"]))
    a, b = draw(pos), draw(pos)
    if kind == "jordan":
        block = {(2, 2): a, (2, 3): b, (3, 3): a}
    elif kind == "scalar":
        block = {(2, 2): a, (3, 3): a}
    elif kind == "antidiagonal":
        block = {(2, 3): a, (3, 2): b}
    else:
        block = {(2, 2): a, (2, 3): draw(nonneg), (3, 2): draw(nonneg), (3, 3): b}
    for (i, j) in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        if block.get((i, j), 0) == 0:
            rows[i - 1][j - 1] = 0
            block.pop((i, j), None)
    fs = make_factor(rows)
    w = dict(block)
    for blk in [(1, 2), (1, 3), (2, 1), (3, 1)]:
        if fs.domain.allowed(*blk):
            w[blk] = draw(pos)
    return fs, TwoBlockPotential.from_weights(fs.domain, w)


@given(setting_c_weights(), st.sampled_from(PATTERNS), st.integers(2, 20))
def test_closed_form_equals_block_product(data, pattern, n):
    fs, f = data
    wm = weight_matrices(fs, f)
    rep = jordan2x2(wm.M22p)
    cf = closed_form(rep, wm, pattern, n)
    bp = block_product(wm, pattern_word(pattern, n))[1] if len(pattern_word(pattern, n)) >= 2 \
        else pattern_value(wm, pattern, n)
    assert float(cf) == pytest.approx(float(bp), rel=1e-8)
    if rep.alpha_exact is not None and (rep.case != "distinct-diagonal" or rep.beta_exact is not None):
        assert cf == bp
    assert cf > 0


@given(setting_c_weights())
def test_jordan_round_trip(data):
    fs, f = data
    M = np.array(weight_matrices(fs, f).M22p, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AmbiguousCaseWarning)
        rep = jordan2x2(M)
    np.testing.assert_allclose(rep.reconstruct(), M, atol=1e-12 * max(1.0, np.abs(M).max()))


@given(pos, pos)
def test_antidiagonal_even_powers_are_scalar(a1, a2):
    m = ((F(0), a1), (a2, F(0)))
    for k in range(16):
        p = _power2(m, 2 * k)
        c = (a1 * a2) ** k
        assert p == ((c, F(0)), (F(0), c))


@given(pos, pos)
def test_antidiagonal_eigenvalues_solve_characteristic_polynomial(a1, a2):
    rep = jordan2x2([[F(0), a1], [a2, F(0)]])
    for lam in rep.eigenvalues:
        assert abs(lam * lam - float(a1 * a2)) <= 1e-12 * max(1.0, float(a1 * a2))
