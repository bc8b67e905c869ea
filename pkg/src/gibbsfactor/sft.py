"""One-sided shifts of finite type given by a 0/1 transition matrix.

Symbols are the integers ``1..k``.  A word is a plain tuple of symbols; every
function that returns words returns them in lexicographic order so that all
downstream tables and reports are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BadDimension, ZeroRowOrColumn

Word = tuple  # tuple[int, ...], symbols 1..k

DEFAULT_POWER_BOUND = 20


def parse_word(text: str | Sequence[int]) -> Word:
    """Accept ``"2221"``, ``"2 2 2 1"`` or an int sequence; return a tuple."""
    if isinstance(text, str):
        parts = text.split() if " " in text.strip() else list(text.strip())
        return tuple(int(p) for p in parts)
    return tuple(int(s) for s in text)


def format_word(word: Sequence[int]) -> str:
    if any(s > 9 for s in word):
        return " ".join(str(s) for s in word)
    return "".join(str(s) for s in word)


@dataclass(frozen=True)
class TransitionSystem:
    """Shift of finite type on symbols ``1..k``.

    ``transitions[i-1][j-1] == 1`` iff the 2-block ``ij`` is allowed.
    Instances are validated by :func:`build_system`; use that instead of
    calling the constructor directly.
    """

    alphabet_size: int
    transitions: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return self.alphabet_size

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.array(self.transitions, dtype=np.int64)
        m.setflags(write=False)
        return m

    @property
    def symbols(self) -> range:
        return range(1, self.k + 1)

    def allowed(self, i: int, j: int) -> bool:
        return self.transitions[i - 1][j - 1] == 1

    def successors(self, i: int) -> list[int]:
        return [j for j in self.symbols if self.allowed(i, j)]

    def allows(self, word: Sequence[int]) -> bool:
        if not word:
            return True
        if any(s < 1 or s > self.k for s in word):
            return False
        return all(self.allowed(a, b) for a, b in zip(word, word[1:]))

    def two_blocks(self) -> list[Word]:
        return [(i, j) for i in self.symbols for j in self.symbols if self.allowed(i, j)]

    def count_words(self, n: int) -> int:
        """|B_n| via matrix powers (exact integers)."""
        if n < 1:
            return 1
        a = [list(r) for r in self.transitions]
        v = [1] * self.k
        for _ in range(n - 1):
            v = [sum(a[i][j] * v[j] for j in range(self.k)) for i in range(self.k)]
        return sum(v)

    def is_full_shift(self) -> bool:
        return all(all(r) for r in self.transitions)


def build_system(k: int, rows: Iterable[Sequence[int]]) -> TransitionSystem:
    """Validate ``rows`` as a k-by-k 0/1 matrix and return the system.

    Raises BadDimension for a malformed matrix and ZeroRowOrColumn when some
    symbol has no successor or no predecessor.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise BadDimension(f"alphabet size must be a positive integer, got {k!r}")
    rows = [tuple(int(x) for x in r) for r in rows]
    if len(rows) != k or any(len(r) != k for r in rows):
        raise BadDimension(f"expected {k} rows of length {k}, got shape "
                           f"{[len(r) for r in rows]}")
    if any(x not in (0, 1) for r in rows for x in r):
        raise BadDimension("transition entries must be 0 or 1")
    for i, r in enumerate(rows, start=1):
        if not any(r):
            raise ZeroRowOrColumn(f"symbol {i} has no successor")
    for j in range(k):
        if not any(r[j] for r in rows):
            raise ZeroRowOrColumn(f"symbol {j + 1} has no predecessor")
    return TransitionSystem(int(k), tuple(rows))


def full_shift(k: int) -> TransitionSystem:
    return build_system(k, [[1] * k for _ in range(k)])


def golden_mean_shift() -> TransitionSystem:
    return build_system(2, [(0, 1), (1, 1)])


def words(sys: TransitionSystem, n: int) -> list[Word]:
    """All allowed n-blocks in lexicographic order."""
    if n < 1:
        raise ValueError("word length must be at least 1")
    level = [(s,) for s in sys.symbols]
    for _ in range(n - 1):
        level = [w + (b,) for w in level for b in sys.successors(w[-1])]
    return level


def iter_words(sys: TransitionSystem, n: int):
    """Lazy lexicographic enumeration, for callers that stop early."""
    stack = [(s,) for s in reversed(sys.symbols)]
    while stack:
        w = stack.pop()
        if len(w) == n:
            yield w
            continue
        for b in reversed(sys.successors(w[-1])):
            stack.append(w + (b,))


@dataclass(frozen=True)
class StructureReport:
    irreducible: bool
    mixing: bool
    mixing_power: int | None
    weak_spec_gap: int | None
    power_bound: int

    def describe(self) -> str:
        mix = (f"mixing (A^{self.mixing_power} > 0)" if self.mixing
               else f"mixing not found <= {self.power_bound}")
        gap = (f"weak specification gap {self.weak_spec_gap}"
               if self.weak_spec_gap is not None
               else f"weak specification gap not found <= {self.power_bound}")
        irr = "irreducible" if self.irreducible else "not irreducible"
        return f"{irr}; {mix}; {gap}"


def _reachability(a: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    reach = (a > 0) | np.eye(k, dtype=bool)
    for m in range(k):
        reach = reach | (reach[:, [m]] & reach[[m], :])
    return reach


def is_irreducible(sys: TransitionSystem) -> bool:
    return bool(_reachability(sys.matrix).all())


def structure_report(sys: TransitionSystem, power_bound: int = DEFAULT_POWER_BOUND) -> StructureReport:
    """Decide irreducibility exactly; search mixing and weak specification up to a bound.

    The weak specification gap is the least p such that every ordered pair
    of symbols (i, j) is joined by a path of length k+1 with 0 <= k <= p.
    For a one-step SFT this is equivalent to the word-level definition.
    """
    if power_bound < 1:
        raise ValueError("power_bound must be >= 1")
    a = (sys.matrix > 0).astype(np.int64)
    irreducible = is_irreducible(sys)
    mixing_power = None
    gap = None
    power = a.copy()
    seen = power > 0  # pairs joined by a path of length <= current
    for p in range(1, power_bound + 1):
        if p > 1:
            power = np.minimum(power @ a, 1)
            seen |= power > 0
        if mixing_power is None and (power > 0).all():
            mixing_power = p
        # path length p corresponds to a connecting word of length p - 1
        if gap is None and irreducible and seen.all():
            gap = p - 1
        if mixing_power is not None and gap is not None:
            break
    return StructureReport(
        irreducible=irreducible,
        mixing=mixing_power is not None,
        mixing_power=mixing_power,
        weak_spec_gap=gap,
        power_bound=power_bound,
    )
