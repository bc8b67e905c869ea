from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gibbsfactor import DepthOverflow, TwoBlockPotential, custom_table, h_table, kernels
from gibbsfactor.tables import decode, encode

from conftest import ROWS, make_factor


@given(st.integers(2, 5), st.lists(st.integers(1, 5), min_size=1, max_size=12))
def test_encode_roundtrip(k, word):
    word = tuple(min(s, k) for s in word)
    assert decode(encode(word, k), len(word), k) == word


def test_codes_preserve_lexicographic_order():
    ws = [(1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2)]
    codes = [encode(w, 2) for w in ws]
    assert codes == sorted(codes)


def test_exact_table_lookup(sys_b):
    fs, f = sys_b
    t = h_table(fs, f, 10)
    assert t.exact
    assert t[(2,) * 7] == 8
    assert isinstance(t.value((1, 2, 2)), Fraction)
    assert (1, 1) not in t  # not a golden-mean word
    with pytest.raises(KeyError):
        t.value((1, 1))


def test_level_totals_and_digits(sys_a):
    fs, f = sys_a
    t = h_table(fs, f, 6)
    assert t.level_total(3) == sum(t.values(3))
    assert [tuple(r) for r in t.digits(4)] == t.words(4)


def test_csv_export(sys_b):
    fs, f = sys_b
    text = h_table(fs, f, 3).to_csv()
    lines = text.splitlines()
    assert lines[0] == "word,length,value"
    assert "222,3,4" in lines
    assert "122,3,2" in lines


def test_float_csv_uses_17_digits(sys_d):
    fs, _ = sys_d
    f = TwoBlockPotential.from_values(fs.domain, {(2, 3): 0.1})
    text = h_table(fs, f, 2).to_csv()
    assert "22,2,2.1051709180756477" in text


def test_budget_exceeded(monkeypatch, sys_a):
    fs, f = sys_a
    monkeypatch.setenv("GIBBSFACTOR_BUDGET", "100")
    with pytest.raises(DepthOverflow, match="GIBBSFACTOR_BUDGET"):
        h_table(fs, f, 12)


def test_encoding_limit(sys_a):
    fs, f = sys_a
    with pytest.raises(DepthOverflow):
        h_table(fs, f, 70)


def test_custom_table_sorts_words():
    t = custom_table(2, [[(2,), (1,)]], [[Fraction(3), Fraction(1, 2)]], exact=True)
    assert t[(1,)] == Fraction(1, 2)
    assert t[(2,)] == 3


def test_exact_mode_switches_to_big_integers():
    # growth beyond 2^62 forces object arrays of Python ints
    fs = make_factor(ROWS["A"])
    f = TwoBlockPotential.from_weights(fs.domain, {(2, 2): 10 ** 6, (3, 3): 5, (1, 2): 3})
    t = h_table(fs, f, 12)
    assert t.numerators[-1].dtype == object
    assert t[(2,) * 12] == 10 ** 66 + 5 ** 11
    assert h_table(fs, f, 3).numerators[-1].dtype == np.int64


@pytest.mark.parametrize("backend", kernels.backends())
def test_backends_agree_with_reference(backend, sys_d):
    fs, _ = sys_d
    f = TwoBlockPotential.from_values(fs.domain, {(2, 3): 0.7, (1, 2): -0.2, (3, 1): 0.4})
    ref = h_table(fs, f, 14, backend="python")
    got = h_table(fs, f, 14, backend=backend)
    for a, b in zip(ref.codes, got.codes):
        assert np.array_equal(a, b)
    for a, b in zip(ref.numerators, got.numerators):
        np.testing.assert_allclose(b, a, rtol=1e-13)
    h1 = kernels.defect_extremes(ref.codes, ref.logs, 2, 14, backend="python")
    h2 = kernels.defect_extremes(ref.codes, ref.logs, 2, 14, backend=backend)
    np.testing.assert_allclose(h2[0], h1[0], rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(h2[1], h1[1], rtol=1e-13, atol=1e-13)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.fiber_levels(np.ones((2, 2)), np.ones((2, 3, 3)), np.ones((2, 3)),
                             np.ones(3), 2, backend="gpu")


def test_exact_input_uses_reference_backend():
    yt = np.array([[0, 1], [1, 1]])
    wb = np.ones((2, 3, 3), dtype=np.int64)
    out = kernels.fiber_levels(yt, wb, np.ones((2, 3), dtype=np.int64),
                               np.ones(3, dtype=np.int64), 3, backend=kernels.BACKEND)
    assert out[-1][1].dtype == np.int64
