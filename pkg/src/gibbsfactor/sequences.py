"""Fiber sums h_n and g_n of a two-block potential and their additivity defects.

For a codomain word y = y_1...y_n,

* ``h_n(y)`` sums ``exp(f[x_1x_2] + ... + f[x_{n-1}x_n])`` over the preimage
  words x of y, and ``h_1 = g_1``;
* ``g_n(y)`` sums the same terms times ``max_a exp(f[x_n a])`` over the
  allowed continuations a, which realises the supremum over separated sets
  exactly for a potential depending on two coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import BadDimension, InsufficientDepth, ZeroMass
from .exact import format_fraction, format_real, log_of, to_fraction
from .factor import FactorSystem, fiber_matrix
from .sft import TransitionSystem, Word, format_word, parse_word
from .tables import WordTable, fiber_table

TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TwoBlockPotential:
    """A potential f(x) = f[x_1 x_2] on a transition system.

    In exact mode the weights ``exp(f[ij])`` are stored as Fractions and the
    values ``f[ij]`` are their (float) logarithms.  Entries for disallowed
    2-blocks are absent.
    """

    system: TransitionSystem
    weights: Mapping  # (i, j) -> Fraction | float, allowed blocks only
    exact: bool

    @classmethod
    def from_values(cls, system: TransitionSystem, values) -> "TwoBlockPotential":
        """Binary64 potential from ``f[ij]`` (mapping or k x k matrix)."""
        vals = _as_block_map(system, values, default=0.0)
        return cls(system, {b: math.exp(float(v)) for b, v in vals.items()}, False)

    @classmethod
    def from_weights(cls, system: TransitionSystem, weights, exact: bool = True) -> "TwoBlockPotential":
        """Potential given by positive weights ``exp(f[ij])`` (default 1)."""
        vals = _as_block_map(system, weights, default=1)
        if exact:
            conv = {b: to_fraction(v) for b, v in vals.items()}
        else:
            conv = {b: float(v) for b, v in vals.items()}
        if any(v <= 0 for v in conv.values()):
            raise BadDimension("weights exp(f[ij]) must be positive")
        return cls(system, conv, exact)

    @classmethod
    def zero(cls, system: TransitionSystem, exact: bool = True) -> "TwoBlockPotential":
        return cls.from_weights(system, {}, exact=exact)

    def weight(self, i: int, j: int):
        return self.weights[(i, j)]

    def f(self, i: int, j: int) -> float:
        return log_of(self.weights[(i, j)])

    def weight_matrix(self) -> np.ndarray:
        """M(i, j) = exp(f[ij]) a_ij; Fractions in exact mode."""
        k = self.system.k
        if self.exact:
            m = np.full((k, k), Fraction(0), dtype=object)
        else:
            m = np.zeros((k, k))
        for (i, j), v in self.weights.items():
            m[i - 1, j - 1] = v
        return m

    def max_continuation(self) -> list:
        """max_a exp(f[i a]) over allowed a, per symbol i."""
        return [max(self.weights[(i, a)] for a in self.system.successors(i))
                for i in self.system.symbols]

    @property
    def min_value(self) -> float:
        return min(self.f(i, j) for i, j in self.weights)

    @property
    def max_value(self) -> float:
        return max(self.f(i, j) for i, j in self.weights)

    def word_sum(self, word: Sequence[int]) -> float:
        """f[x_1x_2] + ... + f[x_{n-1}x_n]."""
        return sum(self.f(a, b) for a, b in zip(word, word[1:]))

    def log_matrix(self) -> np.ndarray:
        """f[ij] as a float matrix, -inf on disallowed blocks."""
        k = self.system.k
        m = np.full((k, k), -np.inf)
        for i, j in self.weights:
            m[i - 1, j - 1] = self.f(i, j)
        return m

    def word_sums(self, digits: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`word_sum` over rows of 1-based symbols."""
        F = self.log_matrix()
        return F[digits[:, :-1] - 1, digits[:, 1:] - 1].sum(axis=1)

    def birkhoff_bounds(self, word: Sequence[int]) -> tuple[float, float]:
        """Range of S_n f over the cylinder [word] (n = len(word))."""
        base = self.word_sum(word)
        tails = [self.f(word[-1], a) for a in self.system.successors(word[-1])]
        return base + min(tails), base + max(tails)

    def is_additive_one_coordinate(self) -> bool:
        return all(len({self.weights[(i, j)] for j in self.system.successors(i)}) == 1
                   for i in self.system.symbols)


def _as_block_map(system: TransitionSystem, data, default) -> dict:
    k = system.k
    if isinstance(data, Mapping):
        out = {}
        for key, v in data.items():
            i, j = (key if isinstance(key, tuple) else parse_word(str(key)))
            if not system.allowed(i, j):
                raise BadDimension(f"2-block {i}{j} is not allowed")
            out[(i, j)] = v
        return {b: out.get(b, default) for b in system.two_blocks()}
    arr = np.asarray(data, dtype=object)
    if arr.shape != (k, k):
        raise BadDimension(f"potential matrix must be {k}x{k}")
    return {(i, j): arr[i - 1, j - 1] for i, j in system.two_blocks()}


def _fiber_start(fs: FactorSystem, exact: bool, vector=None) -> np.ndarray:
    fib = fiber_matrix(fs)
    if vector is None:
        vector = [1] * fs.domain.k
    if exact:
        out = np.empty(fib.shape, dtype=object)
        for idx, v in np.ndenumerate(fib):
            out[idx] = Fraction(vector[idx[1]]) if v else Fraction(0)
        return out
    return fib * np.asarray(vector, dtype=np.float64)[None, :]


def _check_pot(fs: FactorSystem, f: TwoBlockPotential) -> None:
    if f.system != fs.domain:
        raise BadDimension("potential is defined on a different system than the factor domain")


def g_table(fs: FactorSystem, f: TwoBlockPotential, N: int, backend=None) -> WordTable:
    """Table of g_n(y), n = 1..N, over every allowed codomain word."""
    _check_pot(fs, f)
    start = _fiber_start(fs, f.exact)
    tail = np.array(f.max_continuation(), dtype=object if f.exact else np.float64)
    return fiber_table(fs, f.weight_matrix(), start, tail, N, "g", f.exact, backend=backend)


def h_table(fs: FactorSystem, f: TwoBlockPotential, N: int, backend=None) -> WordTable:
    """Table of h_n(y), n = 1..N; the length-1 level equals g_1."""
    _check_pot(fs, f)
    start = _fiber_start(fs, f.exact)
    maxw = f.max_continuation()
    level1 = [sum((maxw[i - 1] for i in fs.fiber(b)), Fraction(0) if f.exact else 0.0)
              for b in fs.codomain.symbols]
    ones = np.array([Fraction(1)] * fs.domain.k, dtype=object) if f.exact else np.ones(fs.domain.k)
    return fiber_table(fs, f.weight_matrix(), start, ones, N, "h", f.exact,
                       level1=level1, backend=backend)


# --------------------------------------------------------------------------
# additivity

@dataclass(frozen=True, eq=False)
class AdditivityReport:
    """Defects D(n, m) = max_y |log t(y) - log t(y[:n]) - log t(y[n:])| for n + m <= N.

    ``defect[n, m]`` is NaN outside the checked range.  ``upper``/``lower``
    hold the signed extremes.  For the weak case the fitted schedule is
    ``C_k = log(K (k + 1))`` with K the smallest constant making
    ``D(n, m) <= log(K (min(n, m) + 1))`` hold on the table.
    """

    depth: int
    defect: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    classification: str
    constant: float
    schedule_factor: float
    fitted_bound: str
    row_max: np.ndarray = field(repr=False)

    @property
    def max_defect(self) -> float:
        return float(np.nanmax(self.defect)) if self.depth >= 2 else 0.0

    def bound(self, k: int) -> float:
        """C_k used for sandwich checks: the constant, or the fitted log schedule."""
        if self.classification == "almost-additive":
            return self.constant
        return math.log(self.schedule_factor * (k + 1))

    def satisfies(self, schedule: Callable[[int], float], tol: float = 1e-12) -> bool:
        """D(n, m) <= schedule(min(n, m)) + tol on every checked pair."""
        for n in range(1, self.depth):
            for m in range(1, self.depth - n + 1):
                if self.defect[n, m] > schedule(min(n, m)) + tol:
                    return False
        return True

    def describe(self) -> str:
        return f"{self.classification}; max defect {format_real(self.max_defect)}; {self.fitted_bound}"

    def to_csv(self) -> str:
        lines = ["n,m,defect,upper,lower"]
        for n in range(1, self.depth):
            for m in range(1, self.depth - n + 1):
                lines.append(f"{n},{m},{format_real(self.defect[n, m])},"
                             f"{format_real(self.upper[n, m])},{format_real(self.lower[n, m])}")
        return "\n".join(lines) + "\n"


def sublinear_growth(values) -> bool:
    """Increments over the last third average at most 3/4 of those over the middle third.

    Linear growth gives a ratio near 1, logarithmic growth well below 3/4.
    """
    inc = np.diff(np.asarray(values, dtype=np.float64))
    third = len(inc) // 3
    if third < 1:
        return False
    middle, last = inc[third:2 * third].mean(), inc[-third:].mean()
    return bool(middle > 0 and last <= 0.75 * middle + TOL)


ZERO_DEFECT_TOL = 1e-12


def _settle_exact_zeros(t: WordTable, N: int, D, hi, lo) -> None:
    """Set D(n, m) to 0 where log rounding hides an exact identity t(y) = t(y1) t(y2)."""
    ky = t.alphabet_size
    for n in range(1, N):
        for m in range(1, N - n + 1):
            if not D[n, m] < ZERO_DEFECT_TOL:
                continue
            L = n + m
            c = t.codes[L - 1]
            ip = np.searchsorted(t.codes[n - 1], c // ky ** m)
            im = np.searchsorted(t.codes[m - 1], c % ky ** m)
            lhs = t.numerators[L - 1].astype(object) * (t.denominators[n - 1] * t.denominators[m - 1])
            rhs = (t.numerators[n - 1].astype(object)[ip] * t.numerators[m - 1].astype(object)[im]
                   * t.denominators[L - 1])
            if np.array_equal(lhs, rhs):
                D[n, m] = hi[n, m] = lo[n, m] = 0.0


def additivity_report(t: WordTable, N: int | None = None, backend=None) -> AdditivityReport:
    """Exhaustive defect table and an additivity classification.

    almost-additive: the running maximum of D over n + m <= L grows by less
    than 1e-9 across the last quarter of L in [2, N].  weakly-almost-additive:
    the worst defect at split size j, c(j), has c(j)/j non-increasing and
    increments that shrink.  Both are heuristics; the raw table is kept.
    """
    N = t.depth if N is None else N
    if N > t.depth:
        raise InsufficientDepth(f"table depth {t.depth} < requested {N}")
    hi, lo = kernels.defect_extremes(t.codes[:N], t.logs[:N], t.alphabet_size, N, backend=backend)
    D = np.fmax(np.abs(hi), np.abs(lo))
    if t.exact:
        _settle_exact_zeros(t, N, D, hi, lo)
    if N < 2:
        return AdditivityReport(N, D, hi, lo, "almost-additive", 0.0, 1.0, "C = 0", np.zeros(1))
    run = np.zeros(N + 1)
    for L in range(2, N + 1):
        vals = [D[n, L - n] for n in range(1, L)]
        run[L] = max(run[L - 1], max(vals))
    C = float(run[N])
    back = max(1, math.ceil(N / 4))
    ref = run[max(2, N - back)]
    jmax = N // 2
    cj = np.array([np.nanmax([D[n, m] for n in range(1, N) for m in range(1, N - n + 1)
                              if min(n, m) == j]) for j in range(1, jmax + 1)])
    K = max(1.0, max(math.exp(D[n, m]) / (min(n, m) + 1)
                     for n in range(1, N) for m in range(1, N - n + 1)))
    if run[N] - ref < TOL:
        cls, bound = "almost-additive", f"C = {format_real(C)}"
    else:
        ratio = cj / np.arange(1, jmax + 1)
        tail = ratio[len(ratio) // 3:]
        if len(cj) >= 4 and np.all(np.diff(tail) <= TOL) and sublinear_growth(cj):
            cls = "weakly-almost-additive"
        else:
            cls = "inconclusive"
        bound = f"C_k = log({K:.12g}*(k+1))"
    return AdditivityReport(N, D, hi, lo, cls, C, K, bound, cj)


# --------------------------------------------------------------------------
# ratio estimators

@dataclass(frozen=True)
class RatioEstimates:
    """Finite-depth estimates of a limit with a convergence flag.

    ``flag`` is ``"converged"``, ``"oscillating"`` or ``"undetermined"``;
    finite data can only show apparent behaviour.  ``converged_at`` is the
    first depth from which every later estimate agrees within ``tol``.
    """

    depths: tuple[int, ...]
    estimates: tuple[float, ...]
    flag: str
    converged_at: int | None
    exact_ratios: tuple | None = None

    def describe(self) -> str:
        vals = ", ".join(format_real(v) for v in self.estimates)
        return f"apparently {self.flag}: [{vals}]"


def _flag(depths, est, tol, window, exact=None):
    est = np.asarray(est, dtype=np.float64)
    conv_at = None
    for i in range(len(est)):
        if exact is not None:
            same = all(e == exact[i] for e in exact[i:])
        else:
            same = bool(np.all(np.abs(est[i:] - est[i]) <= tol))
        if same:
            conv_at = depths[i]
            break
    w = min(window, len(est))
    if len(est) >= 2 and np.ptp(est[-w:]) <= tol:
        return "converged", conv_at
    if len(est) >= 4:
        even, odd = est[-4::2], est[-3::2]
        if np.ptp(even) <= tol and np.ptp(odd) <= tol and abs(even[-1] - odd[-1]) > tol:
            return "oscillating", conv_at
    return "undetermined", conv_at


def ratio_potential_estimates(seq, x_prefix: Sequence[int], depths: Sequence[int] | None = None,
                              tol: float = 1e-9, window: int = 3) -> RatioEstimates:
    """log(f_n(x) / f_{n-1}(shift x)) at the cylinder of ``x_prefix``.

    ``seq`` is a :class:`WordTable` or any callable word -> positive value.
    f_0 is taken to be 1.  Each requested n needs n <= len(x_prefix).
    """
    x = tuple(parse_word(x_prefix))
    depths = tuple(range(1, len(x) + 1)) if depths is None else tuple(depths)
    get = seq.value if isinstance(seq, WordTable) else seq
    est, exact = [], []
    for n in depths:
        if n < 1 or n > len(x) or (isinstance(seq, WordTable) and n > seq.depth):
            raise InsufficientDepth(f"depth {n} needs a prefix/table of length >= {n}")
        num = get(x[:n])
        den = get(x[1:n]) if n > 1 else 1
        r = Fraction(num) / Fraction(den) if isinstance(num, Fraction) else float(num) / float(den)
        exact.append(r if isinstance(r, Fraction) else None)
        est.append(log_of(r))
    exact_t = tuple(exact) if all(e is not None for e in exact) else None
    flag, conv = _flag(depths, est, tol, window, exact_t)
    return RatioEstimates(depths, tuple(est), flag, conv, exact_t)


def measure_ratio_estimates(table: WordTable, P: float, x_prefix: Sequence[int],
                            depths: Sequence[int] | None = None, tol: float = 1e-9,
                            window: int = 3) -> RatioEstimates:
    """log(nu[x_1..x_n] / nu[x_2..x_n]) + P with nu of the empty word equal to 1."""
    x = tuple(parse_word(x_prefix))
    depths = tuple(range(1, min(len(x), table.depth) + 1)) if depths is None else tuple(depths)
    est, exact = [], []
    for n in depths:
        if n < 1 or n > len(x) or n > table.depth:
            raise InsufficientDepth(f"depth {n} needs a prefix/table of length >= {n}")
        num = table.value(x[:n])
        den = table.value(x[1:n]) if n > 1 else (Fraction(1) if table.exact else 1.0)
        if num == 0 or den == 0:
            raise ZeroMass(f"cylinder {format_word(x[:n] if num == 0 else x[1:n])} has mass 0")
        r = num / den
        exact.append(r if table.exact else None)
        est.append(log_of(r) + P)
    exact_t = tuple(exact) if table.exact else None
    flag, conv = _flag(depths, est, tol, window, exact_t)
    return RatioEstimates(depths, tuple(est), flag, conv, exact_t)


# --------------------------------------------------------------------------
# sandwich

@dataclass(frozen=True)
class SandwichResult:
    passed: bool
    worst_excess: float  # max over words of |log-ratio| - C_k (<= 0 means inside)
    worst_word: Word | None
    worst_interval: tuple[float, float] | None
    checked: int

    def describe(self) -> str:
        state = "pass" if self.passed else "fail"
        w = format_word(self.worst_word) if self.worst_word else "-"
        return f"sandwich {state}; worst excess {format_real(self.worst_excess)} at {w}"


def sandwich_check(seq: WordTable, pot, C, depths: Sequence[int] | None = None,
                   side: str = "both", tol: float = TOL) -> SandwichResult:
    """Check exp(-C_k) <= f_k(y) / exp(S_k pot) <= exp(C_k) on every table word.

    ``pot`` is a :class:`TwoBlockPotential` on the codomain or a piecewise
    potential exposing ``birkhoff_interval``.  ``C`` is a constant or a
    callable k -> C_k.  The full interval of S_k over the cylinder [y] is
    used, so a pass is a statement about every point of the cylinder.
    """
    if side not in ("both", "lower", "upper"):
        raise ValueError("side must be both, lower or upper")
    Ck = C if callable(C) else (lambda k, c=float(C): c)
    depths = range(1, seq.depth + 1) if depths is None else depths
    if isinstance(pot, TwoBlockPotential):
        interval = pot.birkhoff_bounds
    else:
        interval = pot.birkhoff_interval
    worst, wword, wint, count = -math.inf, None, None, 0
    for k in depths:
        bound = Ck(k)
        logs = seq.logs[k - 1]
        for word, lv in zip(seq.words(k), logs):
            lo, hi = interval(word)
            r_lo, r_hi = float(lv) - hi, float(lv) - lo
            exc = []
            if side in ("both", "upper"):
                exc.append(r_hi - bound)
            if side in ("both", "lower"):
                exc.append(-r_lo - bound)
            e = max(exc)
            count += 1
            if e > worst:
                worst, wword, wint = e, word, (r_lo, r_hi)
    return SandwichResult(worst <= tol, worst, wword, wint, count)


def table_to_text(t: WordTable) -> str:
    """Compact listing, one word per line (exact fractions in exact mode)."""
    lines = []
    for n in range(1, t.depth + 1):
        for word, v in t.items(n):
            lines.append(f"{format_word(word)} {format_fraction(v) if t.exact else format_real(v)}")
    return "\n".join(lines) + "\n"
