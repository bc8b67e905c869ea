"""One-block factor maps between shifts of finite type."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import BadDimension, EmptyFiber, NotShiftCommuting, NotSurjective
from .sft import TransitionSystem, Word, format_word, is_irreducible, words

DEFAULT_VALIDATION_DEPTH = 8
DEFAULT_K_BOUND = 8

FULL_2_SHIFT = ((1, 1), (1, 1))
GOLDEN_MEAN = ((0, 1), (1, 1))


@dataclass(frozen=True)
class FactorSystem:
    """Domain X, codomain Y and a letter-to-letter map ``symbol_map[i-1] = pi(i)``."""

    domain: TransitionSystem
    codomain: TransitionSystem
    symbol_map: tuple[int, ...]
    validation_depth: int = DEFAULT_VALIDATION_DEPTH

    def image(self, word: Sequence[int]) -> Word:
        return tuple(self.symbol_map[s - 1] for s in word)

    def fiber(self, b: int) -> tuple[int, ...]:
        """Domain symbols mapping to the codomain symbol ``b``."""
        return tuple(i for i in self.domain.symbols if self.symbol_map[i - 1] == b)


def build_factor(X: TransitionSystem, Y: TransitionSystem, symbol_map: Sequence[int] | Mapping[int, int],
                 validation_depth: int = DEFAULT_VALIDATION_DEPTH) -> FactorSystem:
    """Validate a one-block code X -> Y.

    Every 2-block of X must map into B_2(Y) (NotShiftCommuting) and every
    Y-word of length <= validation_depth must have a preimage (NotSurjective).
    """
    if isinstance(symbol_map, Mapping):
        symbol_map = [symbol_map[i] for i in X.symbols]
    symbol_map = tuple(int(b) for b in symbol_map)
    if len(symbol_map) != X.k:
        raise BadDimension(f"symbol map must have {X.k} entries, got {len(symbol_map)}")
    if any(b < 1 or b > Y.k for b in symbol_map):
        raise BadDimension(f"symbol map values must lie in 1..{Y.k}")
    for i, j in X.two_blocks():
        bi, bj = symbol_map[i - 1], symbol_map[j - 1]
        if not Y.allowed(bi, bj):
            raise NotShiftCommuting(
                f"2-block {i}{j} of X maps to {bi}{bj}, which is not allowed in Y")
    fs = FactorSystem(X, Y, symbol_map, validation_depth)
    # reachable-endpoint DP per Y-word: the set of X symbols ending a preimage
    level = {(b,): frozenset(fs.fiber(b)) for b in Y.symbols}
    for n in range(1, validation_depth + 1):
        for w, ends in level.items():
            if not ends:
                raise NotSurjective(f"Y-word {format_word(w)} has no preimage in X")
        if n == validation_depth:
            break
        nxt = {}
        for w, ends in level.items():
            for b in Y.successors(w[-1]):
                nxt[w + (b,)] = frozenset(
                    j for j in fs.fiber(b) if any(X.allowed(i, j) for i in ends))
        level = nxt
    return fs


def preimage_words(fs: FactorSystem, y_word: Sequence[int]) -> list[Word]:
    """All X-words mapping letter-wise onto ``y_word``, lexicographic."""
    y_word = tuple(y_word)
    if not y_word:
        raise ValueError("empty word")
    if not fs.codomain.allows(y_word):
        raise ValueError(f"{format_word(y_word)} is not an allowed Y-word")
    X = fs.domain
    level = [(i,) for i in fs.fiber(y_word[0])]
    for b in y_word[1:]:
        fib = fs.fiber(b)
        level = [w + (j,) for w in level for j in fib if X.allowed(w[-1], j)]
    if not level:
        raise EmptyFiber(f"Y-word {format_word(y_word)} has no preimage; "
                         "the factor system is inconsistent")
    return level


@dataclass(frozen=True)
class SettingCProfile:
    """Whether ``fs`` is a 3-to-2 symbol map of the shape the potential builder supports.

    Required: k_X = 3, k_Y = 2, map (1->1, 2->2, 3->2), X irreducible and Y
    either the full 2-shift or the golden-mean shift.
    """

    valid: bool
    y_type: str | None
    fiber_of_1: tuple[int, ...]
    reasons: tuple[str, ...] = field(default=())

    def describe(self) -> str:
        if self.valid:
            return f"valid ({self.y_type})"
        return "invalid: " + "; ".join(self.reasons)


def settingc_profile(fs: FactorSystem) -> SettingCProfile:
    reasons = []
    X, Y = fs.domain, fs.codomain
    if X.k != 3:
        reasons.append(f"domain has {X.k} symbols, expected 3")
    if Y.k != 2:
        reasons.append(f"codomain has {Y.k} symbols, expected 2")
    if fs.symbol_map != (1, 2, 2):
        reasons.append(f"symbol map {fs.symbol_map} is not (1, 2, 2)")
    if not is_irreducible(X):
        reasons.append("domain is not irreducible")
    y_type = None
    if Y.transitions == FULL_2_SHIFT:
        y_type = "full-2-shift"
    elif Y.transitions == GOLDEN_MEAN:
        y_type = "golden-mean"
    else:
        reasons.append("codomain is neither the full 2-shift nor the golden-mean shift")
    fiber_of_1 = fs.fiber(1) if Y.k >= 1 else ()
    if fiber_of_1 != (1,):
        reasons.append(f"fiber of 1 is {fiber_of_1}, expected (1,)")
    return SettingCProfile(not reasons, y_type, fiber_of_1, tuple(reasons))


@dataclass(frozen=True)
class FiberMixingReport:
    witnessed_k: int | None
    checked_up_to: int
    counterexamples: dict  # k -> (w, u, v)

    def describe(self) -> str:
        if self.witnessed_k is not None:
            return f"fiber-mixing: witnessed at k={self.witnessed_k}"
        # bounded search only: failure up to the bound is not a proof for all k
        return f"fiber-mixing: not witnessed ≤ {self.checked_up_to}"


def _endpoint_pairs(fs: FactorSystem, k: int) -> dict:
    """Map each Y-word of length k to the (first, last) pairs of its preimages."""
    X = fs.domain
    level = {(b,): frozenset((i, i) for i in fs.fiber(b)) for b in fs.codomain.symbols}
    for _ in range(k - 1):
        nxt = {}
        for w, pairs in level.items():
            for b in fs.codomain.successors(w[-1]):
                fib = fs.fiber(b)
                nxt[w + (b,)] = frozenset(
                    (first, j) for first, last in pairs for j in fib if X.allowed(last, j))
        level = nxt
    return level


def fiber_submixing(fs: FactorSystem, k_bound: int = DEFAULT_K_BOUND) -> FiberMixingReport:
    """Exhaustive search for the smallest k at which every fiber is first/last connected.

    At length k the condition holds iff, for every Y-word w, the set of
    (first, last) symbol pairs of preimages of w is a full product
    ``firsts x lasts``.  Counterexamples are lexicographically smallest.
    """
    if k_bound < 1:
        raise ValueError("k_bound must be >= 1")
    counterexamples = {}
    witnessed = None
    for k in range(1, k_bound + 1):
        pairs_by_word = _endpoint_pairs(fs, k)
        bad = None
        for w in sorted(pairs_by_word):
            pairs = pairs_by_word[w]
            firsts = {p[0] for p in pairs}
            lasts = {p[1] for p in pairs}
            if len(pairs) != len(firsts) * len(lasts):
                bad = w
                break
        if bad is None:
            witnessed = k
            break
        pre = preimage_words(fs, bad)
        pairs = pairs_by_word[bad]
        triple = next((bad, u, v) for u in pre for v in pre if (u[0], v[-1]) not in pairs)
        counterexamples[k] = triple
    return FiberMixingReport(witnessed, k_bound if witnessed is None else witnessed, counterexamples)


def identity_factor(X: TransitionSystem) -> FactorSystem:
    """X -> X by the identity; lets domain-side tables reuse the fiber machinery."""
    return FactorSystem(X, X, tuple(X.symbols), 1)


def fiber_matrix(fs: FactorSystem) -> np.ndarray:
    """k_Y x k_X indicator: entry (b, i) = 1 iff pi(i) = b."""
    m = np.zeros((fs.codomain.k, fs.domain.k), dtype=np.int64)
    for i, b in enumerate(fs.symbol_map):
        m[b - 1, i] = 1
    return m


def all_preimages_partition(fs: FactorSystem, n: int) -> bool:
    """True iff the preimage sets over B_n(Y) partition B_n(X)."""
    seen = []
    for y in words(fs.codomain, n):
        seen.extend(preimage_words(fs, y))
    return sorted(seen) == words(fs.domain, n) and len(seen) == len(set(seen))
