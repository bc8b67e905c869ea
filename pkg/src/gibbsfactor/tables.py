"""Word-indexed tables over the codomain language, built by a fiber-sum DP.

A table stores one level per word length.  Words of a level are encoded as
base-k integers (symbol s as digit s-1), so numeric order is lexicographic
order and prefixes/suffixes are integer division/remainder.  In exact mode
the values are integer numerators over one denominator per level.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DepthOverflow
from .exact import format_fraction, format_real, logs_of, narrow, scale_to_integers
from .factor import FactorSystem, fiber_matrix
from .sft import Word, format_word

DEFAULT_BUDGET = 10 ** 7


def budget() -> int:
    raw = os.environ.get("GIBBSFACTOR_BUDGET")
    return int(float(raw)) if raw else DEFAULT_BUDGET


def encode(word: Sequence[int], k: int) -> int:
    code = 0
    for s in word:
        code = code * k + (s - 1)
    return code


def decode(code: int, length: int, k: int) -> Word:
    out = []
    for _ in range(length):
        code, r = divmod(int(code), k)
        out.append(r + 1)
    return tuple(reversed(out))


@dataclass(frozen=True, eq=False)
class WordTable:
    """Positive (or nonnegative, for measures) values on B_n(Y), n = 1..depth.

    ``kind`` is ``"h"``, ``"g"``, ``"measure"`` or ``"custom"``.
    """

    kind: str
    alphabet_size: int
    exact: bool
    codes: tuple
    numerators: tuple
    denominators: tuple
    logs: tuple

    @property
    def depth(self) -> int:
        return len(self.codes)

    def _locate(self, word: Sequence[int]) -> tuple[int, int]:
        n = len(word)
        if n < 1 or n > self.depth:
            raise KeyError(f"word length {n} outside table depth {self.depth}")
        code = encode(word, self.alphabet_size)
        codes = self.codes[n - 1]
        i = int(np.searchsorted(codes, code))
        if i >= len(codes) or codes[i] != code:
            raise KeyError(f"{format_word(word)} is not in the table")
        return n, i

    def value(self, word: Sequence[int]):
        """Exact ``Fraction`` in exact mode, else float."""
        n, i = self._locate(word)
        num = self.numerators[n - 1][i]
        if self.exact:
            return Fraction(int(num), self.denominators[n - 1])
        return float(num)

    __getitem__ = value

    def log_value(self, word: Sequence[int]) -> float:
        n, i = self._locate(word)
        return float(self.logs[n - 1][i])

    def __contains__(self, word) -> bool:
        try:
            self._locate(word)
        except KeyError:
            return False
        return True

    def words(self, n: int) -> list[Word]:
        return [decode(c, n, self.alphabet_size) for c in self.codes[n - 1]]

    def digits(self, n: int) -> np.ndarray:
        """Words of length n as rows of 1-based symbols, in table order."""
        c = np.asarray(self.codes[n - 1], dtype=np.int64)
        powers = self.alphabet_size ** np.arange(n - 1, -1, -1, dtype=np.int64)
        return (c[:, None] // powers[None, :]) % self.alphabet_size + 1

    def values(self, n: int) -> list:
        nums = self.numerators[n - 1]
        if self.exact:
            d = self.denominators[n - 1]
            return [Fraction(int(v), d) for v in nums]
        return [float(v) for v in nums]

    def items(self, n: int):
        return zip(self.words(n), self.values(n))

    def level_total(self, n: int):
        nums = self.numerators[n - 1]
        if self.exact:
            return Fraction(sum(int(v) for v in nums), self.denominators[n - 1])
        return float(np.sum(nums))

    def word_strings(self, n: int) -> list[str]:
        """:func:`format_word` of every level-n word, vectorised for small alphabets."""
        if self.alphabet_size > 9:
            return [format_word(w) for w in self.words(n)]
        chars = (self.digits(n) + ord("0")).astype(np.uint8)
        return [b.decode("ascii") for b in chars.view(f"S{n}").ravel()]

    def value_strings(self, n: int) -> list[str]:
        nums = self.numerators[n - 1]
        if not self.exact:
            return [format_real(float(v)) for v in nums]
        d = self.denominators[n - 1]
        if nums.dtype == np.int64:
            g = np.gcd(nums, d)
            return [str(a) if b == 1 else f"{a}/{b}"
                    for a, b in zip((nums // g).tolist(), (d // g).tolist())]
        return [format_fraction(Fraction(int(v), d)) for v in nums]

    def to_csv(self, path=None, header: str = "value") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["word", "length", header])
        for n in range(1, self.depth + 1):
            w.writerows(zip(self.word_strings(n), [n] * len(self.codes[n - 1]),
                            self.value_strings(n)))
        out = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(out)
        return out


def check_budget(fs: FactorSystem, depth: int) -> None:
    ky = fs.codomain.k
    if depth >= 2 and (depth - 1) * np.log(ky) >= 62 * np.log(2):
        raise DepthOverflow(f"depth {depth} exceeds the 64-bit word encoding for {ky} symbols")
    size = fs.codomain.count_words(depth) * fs.domain.k
    cap = budget()
    if size > cap:
        raise DepthOverflow(f"{size} table entries at depth {depth} exceed the budget {cap} "
                            "(set GIBBSFACTOR_BUDGET to raise it)")


def fiber_table(fs: FactorSystem, weights: np.ndarray, start: np.ndarray, tail: np.ndarray,
                depth: int, kind: str, exact: bool, level1=None, backend=None) -> WordTable:
    """Evaluate ``start[b1] W_{b2} ... W_{bn} . tail`` for every codomain word.

    ``weights`` is the k_X x k_X domain weight matrix, ``start`` a (k_Y, k_X)
    matrix of initial row vectors (already restricted to the fiber of b1) and
    ``tail`` the closing vector.  ``level1`` optionally replaces the length-1
    values.  In exact mode all inputs hold Fractions.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    check_budget(fs, depth)
    fib = fiber_matrix(fs)
    ky, kx = fib.shape
    ytrans = fs.codomain.matrix

    if exact:
        w_int, dw = scale_to_integers(np.asarray(weights, dtype=object))
        s_int, ds = scale_to_integers(np.asarray(start, dtype=object))
        t_int, dt = scale_to_integers(np.asarray(tail, dtype=object))
        grow = max(1, max(sum(int(x) for x in row) for row in w_int))
        bound = (max(sum(int(x) for x in row) for row in s_int) * grow ** (depth - 1)
                 * max(1, max(int(x) for x in t_int)))
        w_use = narrow(w_int, bound)
        wblocks = np.stack([w_use * fib[b][None, :] for b in range(ky)])
        levels = kernels.fiber_levels(ytrans, wblocks, narrow(s_int, bound),
                                      narrow(t_int, bound), depth, backend="python")
        denoms = [ds * dw ** (n - 1) * dt for n in range(1, depth + 1)]
        nums = [np.asarray(v) for _, v in levels]
        if level1 is not None:
            l1 = np.asarray(level1, dtype=object)
            l1_int, d1 = scale_to_integers(l1)
            nums[0] = narrow(l1_int, max(int(x) for x in l1_int) + 1)
            denoms[0] = d1
    else:
        w = np.asarray(weights, dtype=np.float64)
        wblocks = np.stack([w * fib[b][None, :] for b in range(ky)])
        levels = kernels.fiber_levels(ytrans, wblocks, np.asarray(start, dtype=np.float64),
                                      np.asarray(tail, dtype=np.float64), depth, backend=backend)
        denoms = [1] * depth
        nums = [np.asarray(v, dtype=np.float64) for _, v in levels]
        if level1 is not None:
            nums[0] = np.asarray(level1, dtype=np.float64)
    codes = tuple(np.asarray(c, dtype=np.int64) for c, _ in levels)
    for c in codes:
        c.setflags(write=False)
    logs = tuple(logs_of(v, d) for v, d in zip(nums, denoms))
    return WordTable(kind, ky, exact, codes, tuple(nums), tuple(denoms), logs)


def custom_table(k: int, level_words: Sequence[Sequence[Word]], level_values, exact: bool,
                 kind: str = "custom") -> WordTable:
    """Build a table from explicit per-level word lists and values (tests, oracles)."""
    codes, nums, denoms, logs = [], [], [], []
    for ws, vs in zip(level_words, level_values):
        order = np.argsort([encode(wd, k) for wd in ws], kind="stable")
        c = np.array([encode(ws[i], k) for i in order], dtype=np.int64)
        vals = [vs[i] for i in order]
        if exact:
            ints, d = scale_to_integers(np.array([Fraction(v) for v in vals], dtype=object))
            nums.append(ints)
            denoms.append(d)
            logs.append(logs_of(ints, d))
        else:
            arr = np.array(vals, dtype=np.float64)
            nums.append(arr)
            denoms.append(1)
            logs.append(logs_of(arr))
        codes.append(c)
    return WordTable(kind, k, exact, tuple(codes), tuple(nums), tuple(denoms), tuple(logs))
