import numpy as np
import pytest
from hypothesis import given, strategies as st

from gibbsfactor import (BadDimension, ZeroRowOrColumn, build_system, full_shift,
                         golden_mean_shift, parse_word, format_word, structure_report, words)
from gibbsfactor.sft import iter_words

from conftest import ROWS


def test_sys_a_is_valid():
    X = build_system(3, ROWS["A"])
    assert X.k == 3
    assert X.allows((1, 2, 2, 1, 3))
    assert not X.allows((2, 3))


def test_full_two_shift():
    assert full_shift(2).is_full_shift()


def test_zero_row_rejected():
    with pytest.raises(ZeroRowOrColumn):
        build_system(2, [(0, 0), (1, 1)])


def test_zero_column_rejected():
    with pytest.raises(ZeroRowOrColumn):
        build_system(2, [(1, 0), (1, 0)])


@pytest.mark.parametrize("rows", [[(1, 1)], [(1, 2), (1, 1)], [(1, 1, 1), (1, 1, 1)]])
def test_bad_shapes(rows):
    with pytest.raises(BadDimension):
        build_system(2, rows)


@pytest.mark.parametrize("system,n,count", [
    (full_shift(2), 2, 4),
    (build_system(3, ROWS["A"]), 2, 6),
    (build_system(3, ROWS["B"]), 2, 6),
])
def test_word_counts(system, n, count):
    assert len(words(system, n)) == count
    assert system.count_words(n) == count


def test_words_are_lexicographic_and_lazy_enumeration_agrees():
    X = build_system(3, ROWS["B"])
    ws = words(X, 6)
    assert ws == sorted(ws)
    assert list(iter_words(X, 6)) == ws


def test_parse_and_format():
    assert parse_word("1221") == (1, 2, 2, 1)
    assert format_word((1, 2, 2, 1)) == "1221"


def test_structure_reports():
    rep = structure_report(build_system(3, ROWS["A"]), 10)
    assert rep.irreducible and rep.mixing
    assert not structure_report(build_system(2, [(1, 0), (0, 1)]), 10).irreducible
    gm = structure_report(golden_mean_shift(), 10)
    assert gm.mixing and gm.mixing_power == 2


def test_periodic_system_is_irreducible_not_mixing():
    rep = structure_report(build_system(2, [(0, 1), (1, 0)]), 10)
    assert rep.irreducible and not rep.mixing
    assert "mixing not found <= 10" in rep.describe()


matrices = st.integers(2, 5).flatmap(
    lambda k: st.lists(st.lists(st.integers(0, 1), min_size=k, max_size=k),
                       min_size=k, max_size=k))


def _system_or_none(rows):
    try:
        return build_system(len(rows), rows)
    except ZeroRowOrColumn:
        return None


@given(matrices)
def test_mixing_implies_irreducible(rows):
    X = _system_or_none(rows)
    if X is None:
        return
    rep = structure_report(X, 12)
    assert not rep.mixing or rep.irreducible


@given(matrices, st.integers(1, 7))
def test_word_count_recursion(rows, n):
    X = _system_or_none(rows)
    if X is None:
        return
    level = words(X, n)
    nxt = words(X, n + 1)
    assert len(nxt) == sum(len(X.successors(w[-1])) for w in level)
    assert all(X.allows(w) for w in nxt)
    assert len(nxt) == X.count_words(n + 1)


@given(matrices)
def test_count_words_matches_matrix_power(rows):
    X = _system_or_none(rows)
    if X is None:
        return
    A = np.array(rows, dtype=np.int64)
    assert X.count_words(5) == int(np.linalg.matrix_power(A, 4).sum())
