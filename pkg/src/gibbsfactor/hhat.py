"""The piecewise potential on the codomain whose Birkhoff sums track log h_n.

Every point y of Y = {1,2}^N (or the golden-mean shift) falls in one class:

=========  ================================  =================================
class      points                            value
=========  ================================  =================================
[21]       start 21                          log h[21]
[2^n1]     start 2^n 1, n >= 2               log(h[2^n1] / h[2^(n-1)1])
2^inf      2 2 2 ...                         lim log(h[2^(n+1)] / h[2^n])
[12^n1]    start 1 2^n 1, n >= 1             log(h[12^n1] / h[2^n1])
12^inf     1 2 2 2 ...                       lim log(h[12^n] / h[2^n])
[1^n2]     start 1^n 2, n >= 2               f[11]
1^inf      1 1 1 ...                         f[11]
=========  ================================  =================================

Three variants share the table and differ at the infinite points: ``hhat``
uses the limits, ``hhat1`` replaces the value at 12^inf by
log((xbar z + ybar w)/(xbar + ybar)) and ``hhat2`` puts 1/2 log(a1 a2) at
both 2^inf and 12^inf for an antidiagonal fiber block (0 a1; a2 0).
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CaseMismatch, SettingCViolation, UndefinedAtPoint, UndefinedBranch
from .exact import format_fraction, format_real, log_of
from .factor import FactorSystem, settingc_profile
from .jordan import (FLOAT_TOL, Jordan2x2Report, LimitValue, RatioLimits, WeightMatrices,
                     closed_form, jordan2x2, pattern_value, ratio_limits, weight_matrices)
from .sft import format_word, parse_word

DEFAULT_TAIL_DEPTH = 64
RUN_WINDOW = 64

OPEN_CONTINUITY = "unknown; left open"


@dataclass(frozen=True)
class LogValue:
    """A real value with a printable exact form such as ``log(5/4)``."""

    value: float
    expr: str

    @classmethod
    def of_ratio(cls, r) -> "LogValue":
        if isinstance(r, Fraction):
            return cls(log_of(r), f"log({format_fraction(r)})")
        return cls(math.log(float(r)), format_real(math.log(float(r))))

    @classmethod
    def half_log(cls, r) -> "LogValue":
        v = 0.5 * log_of(r) if isinstance(r, Fraction) else 0.5 * math.log(float(r))
        expr = f"1/2 log({format_fraction(r)})" if isinstance(r, Fraction) else format_real(v)
        return cls(v, expr)

    def text(self) -> str:
        num = format_real(self.value)
        return self.expr if self.expr == num else f"{self.expr} = {num}"


@dataclass(frozen=True)
class PointClass:
    """One of the classes of the table; ``n`` is the run length where relevant."""

    kind: str  # "2n1" (n=1 is [21]), "12n1", "1n2", "2inf", "12inf", "1inf"
    n: int | None = None

    def label(self) -> str:
        if self.kind == "2n1":
            return "[21]" if self.n == 1 else f"[2^{self.n} 1]"
        if self.kind == "12n1":
            return f"[1 2^{self.n} 1]"
        if self.kind == "1n2":
            return f"[1^{self.n} 2]"
        return {"2inf": "2^inf", "12inf": "12^inf", "1inf": "1^inf"}[self.kind]


def _run(seq: Sequence[int], start: int, sym: int) -> int:
    k = start
    while k < len(seq) and seq[k] == sym:
        k += 1
    return k - start


def _resolve(word: Sequence[int]) -> PointClass | None:
    """Class of every point of the cylinder [word], or None if it varies."""
    y = tuple(word)
    if not y:
        return None
    if y[0] == 2:
        r = _run(y, 0, 2)
        return PointClass("2n1", r) if r < len(y) else None
    if len(y) < 2:
        return None
    if y[1] == 2:
        r = _run(y, 1, 2)
        return PointClass("12n1", r) if 1 + r < len(y) else None
    r = _run(y, 0, 1)
    return PointClass("1n2", r) if r < len(y) else None


def point_class(word: Sequence[int], tail: int | str | None = None) -> PointClass:
    """Class of the point ``word`` followed by ``tail`` repeated forever.

    ``tail`` is None when ``word`` alone determines the class.
    """
    y = tuple(parse_word(word)) if isinstance(word, str) else tuple(word)
    if tail is None:
        cls = _resolve(y)
        if cls is None:
            raise ValueError(f"the class of [{format_word(y)}] depends on its continuation")
        return cls
    t = int(tail)
    if t not in (1, 2):
        raise ValueError("tail symbol must be 1 or 2")
    cls = _resolve(y)
    if cls is not None:
        return cls
    ext = y + (t,) * 2
    cls = _resolve(ext)
    if cls is not None:
        return cls
    # the word plus two copies of the tail is still unresolved: a run never ends
    if not y:
        return PointClass("2inf" if t == 2 else "1inf")
    if y[0] == 2:
        return PointClass("2inf")
    if len(ext) >= 2 and ext[1] == 2:
        return PointClass("12inf")
    return PointClass("1inf")


@dataclass(frozen=True, eq=False)
class FactorClassification:
    """Case of the factor: how the fiber block decides the shape of the potential."""

    case: str
    variant: str
    continuity: dict
    conditions: tuple[str, ...]
    jordan: Jordan2x2Report
    limits: RatioLimits
    notes: tuple[str, ...] = ()
    additivity: object = None

    @property
    def is_open(self) -> bool:
        return self.case == "open-antidiagonal-asymmetric"

    def describe(self) -> str:
        lines = [f"case: {self.case}", f"variant: {self.variant}",
                 f"fiber block: {self.jordan.describe()}"]
        lines += [f"condition: {c}" for c in self.conditions]
        for where in ("2^inf", "12^inf", "elsewhere"):
            lines.append(f"continuity at {where}: {self.continuity[where]}")
        lines += [f"note: {n}" for n in self.notes]
        if self.additivity is not None:
            lines.append(f"additivity: {self.additivity.describe()}")
        return "\n".join(lines)


def _same(a: LimitValue | None, b: LimitValue | None, exact: bool) -> bool:
    if a is None or b is None or not a.exists or not b.exists:
        return False
    if exact and a.ratio is not None and b.ratio is not None:
        return a.ratio == b.ratio
    return abs(a.value - b.value) <= 1e-9 * max(1.0, abs(a.value))


def _fmt(x) -> str:
    return format_fraction(x) if isinstance(x, Fraction) else format_real(float(x))


def _select(wm: WeightMatrices, rep: Jordan2x2Report, lim: RatioLimits):
    """(case, variant, conditions, notes)."""
    conds, notes = [], []
    if rep.case == "antidiagonal":
        a1, a2 = rep.a1, rep.a2
        conds.append(f"fiber block (0 a1; a2 0) with a1 = {_fmt(a1)}, a2 = {_fmt(a2)}")
        sym_col = wm.xbar == wm.ybar
        sym_row = wm.z == wm.w
        conds.append(f"xbar = ybar: {sym_col}; z = w: {sym_row}")
        notes.append("tail criterion taken as a2 xbar^2 = a1 ybar^2, the non-trivial factor of "
                     "(a1 ybar + a2 xbar)^2 - a1 a2 (xbar + ybar)^2")
        if a1 == a2 and (sym_col or sym_row):
            return "(iii)-symmetric-antidiagonal", "hhat", conds, notes
        if a1 != a2:
            return "antidiagonal-measurable", "hhat2", conds, notes
        return "open-antidiagonal-asymmetric", "hhat2", conds, notes
    a, b, c, d = rep.basis
    if rep.case == "jordan-block":
        expr = (c * wm.w + a * wm.z) * (-c * wm.xbar + a * wm.ybar)
        zero = expr == 0 if rep.exact else abs(float(expr)) <= FLOAT_TOL
        conds.append(f"(wc+az)(-c xbar+a ybar) = {_fmt(expr)}")
        variant = "hhat1" if zero else "hhat"
    elif rep.case == "scalar-diagonal":
        conds.append("fiber block is a multiple of the identity")
        variant = "hhat1"
    else:
        conds.append("fiber block has distinct real eigenvalues")
        variant = "hhat"
    if rep.warning:
        notes.append(rep.warning)
    return "(ii)-continuous", variant, conds, notes


def classify_factor(fs: FactorSystem, f, additivity=None) -> FactorClassification:
    """Case tag, variant and continuity report for a supported 3-to-2 factor."""
    prof = settingc_profile(fs)
    if not prof.valid:
        raise SettingCViolation(prof.describe())
    wm = weight_matrices(fs, f)
    rep = jordan2x2(wm.M22p, exact=wm.exact)
    lim = ratio_limits(rep, wm)
    case, variant, conds, notes = _select(wm, rep, lim)
    at2, at12 = _infinite_values(wm, rep, lim, variant)
    cont = {}
    if case == "open-antidiagonal-asymmetric":
        cont["2^inf"] = cont["12^inf"] = OPEN_CONTINUITY
    else:
        cont["2^inf"] = _continuity(lim.tail_2n1, at2, wm.exact)
        cont["12^inf"] = _continuity(lim.tail_12n1, at12, wm.exact)
    cont["elsewhere"] = "locally constant"
    return FactorClassification(case, variant, cont, tuple(conds), rep, lim, tuple(notes),
                                additivity)


def _continuity(tail: LimitValue, value: LimitValue | None, exact: bool) -> str:
    if value is None or not value.exists:
        return "undefined (limit does not exist)"
    if not tail.exists:
        return "discontinuous (tail values do not converge)"
    if _same(tail, value, exact):
        return "continuous"
    return f"discontinuous (tail limit {format_real(tail.value)} != {format_real(value.value)})"


def _infinite_values(wm, rep, lim, variant):
    """Values at 2^inf and 12^inf after the variant's overrides."""
    at2, at12 = lim.at_2inf, lim.at_12inf
    if variant == "hhat1":
        r = (wm.xbar * wm.z + wm.ybar * wm.w) / (wm.xbar + wm.ybar)
        at12 = LimitValue(log_of(r), "log((xbar z + ybar w)/(xbar + ybar))",
                          r if isinstance(r, Fraction) else None)
    elif variant == "hhat2":
        prod = rep.a1 * rep.a2
        half = 0.5 * log_of(prod)
        root = None
        if isinstance(prod, Fraction):
            from .jordan import _sqrt_exact
            root = _sqrt_exact(prod)
        at2 = at12 = LimitValue(half, "1/2 log(a1 a2)", root)
    return at2, at12


@dataclass(frozen=True, eq=False)
class PiecewisePotential:
    """Values of the potential on every class; see the module docstring."""

    variant: str
    y_type: str
    exact: bool
    depth: int
    at_21: LogValue
    tail_2n1: tuple  # LogValue for n = 2..depth (index n - 2)
    tail_12n1: tuple  # LogValue for n = 1..depth (index n - 1)
    at_2inf: LogValue | None
    at_12inf: LogValue | None
    f11: LogValue | None
    classification: FactorClassification
    weights: WeightMatrices = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    # ---- class values
    def _v2(self, n: int) -> float:
        if n == 1:
            return self.at_21.value
        if n <= self.depth:
            return self.tail_2n1[n - 2].value
        return self.tail_generator("2n1", n)

    def _v12(self, n: int) -> float:
        if n <= self.depth:
            return self.tail_12n1[n - 1].value
        return self.tail_generator("12n1", n)

    def tail_generator(self, kind: str, n: int) -> float:
        """Closed-form value on [2^n1] or [12^n1] for any n (used beyond the table)."""
        rep, wm = self.classification.jordan, self.weights
        if kind == "2n1":
            if n == 1:
                return self.at_21.value
            num, den = closed_form(rep, wm, "2^n1", n), closed_form(rep, wm, "2^n1", n - 1)
        elif kind == "12n1":
            num, den = closed_form(rep, wm, "12^n1", n), closed_form(rep, wm, "2^n1", n)
        else:
            raise ValueError(kind)
        try:
            if isinstance(num, Fraction) and isinstance(den, Fraction):
                return log_of(num / den)
            return math.log(float(num)) - math.log(float(den))
        except (OverflowError, ValueError):
            lim = self.at_2inf if kind == "2n1" else self.at_12inf
            if lim is None:
                raise UndefinedAtPoint(f"no value for {kind} at n={n}") from None
            return lim.value

    def class_value(self, cls: PointClass) -> LogValue:
        if cls.kind == "2n1":
            if cls.n == 1:
                return self.at_21
            if cls.n <= self.depth:
                return self.tail_2n1[cls.n - 2]
            v = self.tail_generator("2n1", cls.n)
            return LogValue(v, format_real(v))
        if cls.kind == "12n1":
            if cls.n <= self.depth:
                return self.tail_12n1[cls.n - 1]
            v = self.tail_generator("12n1", cls.n)
            return LogValue(v, format_real(v))
        if cls.kind in ("1n2", "1inf"):
            if self.f11 is None:
                raise UndefinedBranch(f"{cls.label()} is vacuous: 11 is not an allowed codomain block")
            return self.f11
        val = self.at_2inf if cls.kind == "2inf" else self.at_12inf
        if val is None:
            raise UndefinedAtPoint(f"{self.variant} has no value at {cls.label()}: "
                                   "the defining limit does not exist")
        return val

    def eval(self, point, tail=None) -> float:
        """Value at a point given as a :class:`PointClass` or as (word, tail symbol)."""
        cls = point if isinstance(point, PointClass) else point_class(point, tail)
        return self.class_value(cls).value

    # ---- Birkhoff sums
    def _arrays(self, upto: int):
        """Values on [2^m1] and [12^m1] for m = 0..upto and the prefix sums of the former."""
        got = self._cache.get("arrays")
        if got is not None and got[0] >= upto:
            return got[1:]
        upto = max(upto, 2 * self.depth)
        v2 = np.full(upto + 1, np.nan)
        v12 = np.full(upto + 1, np.nan)
        for m in range(1, upto + 1):
            v2[m] = self._v2(m)
            v12[m] = self._v12(m)
        c2 = np.concatenate([[0.0], np.cumsum(v2[1:])])
        self._cache["arrays"] = (upto, v2, v12, c2)
        return v2, v12, c2

    def birkhoff_sum(self, word: Sequence[int], tail: int) -> float:
        """S_n of the potential at the point ``word`` followed by ``tail`` forever."""
        y = tuple(word)
        total = 0.0
        for i in range(len(y)):
            total += self.class_value(point_class(y[i:], tail)).value
        return total

    def birkhoff_interval(self, y_word: Sequence[int]) -> tuple[float, float]:
        """[lo, hi] containing S_n(y) for every point y of the cylinder [y_word].

        Positions whose class is fixed by the word contribute exactly.  The
        classes inside the trailing run all depend on one number, the full
        length s of that run (after a final 1: the length t of the next
        2-run), so the sum is evaluated jointly for every s in a window of
        128 past the word and at s = infinity.  Beyond the window the sum is
        taken to be monotone (then its limit is added as a candidate) or
        2-periodic; any residual non-periodicity widens the interval.
        """
        y = tuple(y_word)
        n = len(y)
        if n == 0:
            return 0.0, 0.0
        last = y[-1]
        r = _run(y[::-1], 0, last)
        start = n - r
        fixed = 0.0
        special = False
        for i in range(start):
            cls = _resolve(y[i:])
            if cls is None:
                special = True  # a 1 directly before the trailing 2-run
                continue
            fixed += self.class_value(cls).value
        span = 2 * RUN_WINDOW
        v2, v12, c2 = self._arrays(r + span + 1)
        lim = self.classification.limits
        if last == 2:
            s = np.arange(r, r + span + 1)
            sums = c2[s] - c2[s - r]
            tail_lim = r * lim.tail_2n1.value if lim.tail_2n1.exists else None
            if special:
                sums = sums + v12[s]
                if tail_lim is not None:
                    tail_lim = tail_lim + lim.tail_12n1.value if lim.tail_12n1.exists else None
            lo, hi = _window_extremes(sums, tail_lim)
            at_inf = r * self.class_value(PointClass("2inf")).value
            if special:
                at_inf += self.class_value(PointClass("12inf")).value
            return fixed + min(lo, at_inf), fixed + max(hi, at_inf)
        # trailing run of 1s
        f11 = self.f11.value if self.f11 is not None else None
        if r >= 2 and f11 is None:
            raise UndefinedBranch("11 is not an allowed codomain block")
        base = fixed + (r - 1) * (f11 or 0.0)
        lo, hi = _window_extremes(v12[1:span + 1],
                                  lim.tail_12n1.value if lim.tail_12n1.exists else None)
        at_inf = self.class_value(PointClass("12inf")).value
        lo, hi = base + min(lo, at_inf), base + max(hi, at_inf)
        if f11 is not None:
            cont = fixed + r * f11  # the run of 1s goes on past the word
            lo, hi = min(lo, cont), max(hi, cont)
        return lo, hi

    # ---- export
    def to_text(self) -> str:
        cls = self.classification
        lines = [f"variant: {self.variant}", f"case: {cls.case}", f"codomain: {self.y_type}",
                 f"fiber block: {cls.jordan.describe()}",
                 f"[21]: {self.at_21.text()}"]
        for n, v in enumerate(self.tail_2n1, start=2):
            lines.append(f"[2^{n} 1]: {v.text()}")
        for n, v in enumerate(self.tail_12n1, start=1):
            lines.append(f"[1 2^{n} 1]: {v.text()}")
        if self.f11 is None:
            lines.append("[1^n2], n>=2: vacuous (11 not allowed)")
            lines.append("1^inf: vacuous (11 not allowed)")
        else:
            lines.append(f"[1^n2], n>=2: {self.f11.text()}")
            lines.append(f"1^inf: {self.f11.text()}")
        for name, val, lim in (("2^inf", self.at_2inf, cls.limits.at_2inf),
                               ("12^inf", self.at_12inf, cls.limits.at_12inf)):
            tag = "limit" if lim.exists and val is not None and _same_value(val, lim) else "override"
            if val is None:
                lines.append(f"{name}: undefined ({lim.describe()})")
            else:
                lines.append(f"{name}: {val.text()} [{tag}; limit {lim.describe()}]")
        lines.append(f"tail limit on [2^n1]: {cls.limits.tail_2n1.describe()}")
        lines.append(f"tail limit on [12^n1]: {cls.limits.tail_12n1.describe()}")
        for where in ("2^inf", "12^inf", "elsewhere"):
            lines.append(f"continuity at {where}: {cls.continuity[where]}")
        lines += [f"condition: {c}" for c in cls.conditions]
        lines += [f"note: {n}" for n in cls.notes]
        return "\n".join(lines) + "\n"


def _window_extremes(vals: np.ndarray, tail_limit: float | None) -> tuple[float, float]:
    """Extremes of a sequence known on a window, extended past it.

    Over the second half of the window the sequence must look monotone (the
    limit joins the candidates) or 2-periodic; otherwise the interval is
    widened by the largest observed period-2 drift.
    """
    lo, hi = float(vals.min()), float(vals.max())
    half = vals[len(vals) // 2:]
    d = np.diff(half)
    eps = 1e-13 * max(1.0, float(np.abs(half).max()))
    if np.all(d <= eps) or np.all(d >= -eps):
        if tail_limit is not None:
            lo, hi = min(lo, tail_limit), max(hi, tail_limit)
        return lo, hi
    drift = float(np.abs(half[2:] - half[:-2]).max())
    if drift > eps:
        lo, hi = lo - drift, hi + drift
    return lo, hi


def _same_value(val: LogValue, lim: LimitValue) -> bool:
    return abs(val.value - lim.value) <= 1e-12 * max(1.0, abs(lim.value))


def _as_logvalue(lv: LimitValue | None) -> LogValue | None:
    if lv is None or not lv.exists:
        return None
    if lv.ratio is not None:
        return LogValue.of_ratio(lv.ratio)
    return LogValue(lv.value, format_real(lv.value))


VARIANTS = ("hhat", "hhat1", "hhat2")


def build_hhat(fs: FactorSystem, f, N: int = DEFAULT_TAIL_DEPTH, additivity=None,
               variant: str | None = None) -> PiecewisePotential:
    """Construct the potential.

    The variant is the one chosen by :func:`classify_factor` unless
    ``variant`` forces another (``hhat2`` needs an antidiagonal fiber
    block).  Tail values for n <= N come from exact matrix powers; beyond N
    the closed forms are used.  The classification is attached as
    ``.classification``.
    """
    if N < 2:
        raise ValueError("tail depth must be >= 2")
    cls = classify_factor(fs, f, additivity)
    if variant is not None and variant != cls.variant:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        if variant == "hhat2" and cls.jordan.case != "antidiagonal":
            raise CaseMismatch("hhat2 needs an antidiagonal fiber block")
        cls = dataclasses.replace(cls, variant=variant,
                                  notes=cls.notes + (f"variant forced to {variant}",))
    wm = weight_matrices(fs, f)
    rep, lim = cls.jordan, cls.limits
    h2n1 = [pattern_value(wm, "2^n1", n) for n in range(1, N + 1)]
    h12n1 = [pattern_value(wm, "12^n1", n) for n in range(1, N + 1)]
    tail2 = tuple(LogValue.of_ratio(h2n1[n - 1] / h2n1[n - 2]) for n in range(2, N + 1))
    tail12 = tuple(LogValue.of_ratio(h12n1[n - 1] / h2n1[n - 1]) for n in range(1, N + 1))
    at2, at12 = _infinite_values(wm, rep, lim, cls.variant)
    f11 = None if wm.f11 is None else LogValue.of_ratio(wm.f11)
    at2v, at12v = _as_logvalue(at2), _as_logvalue(at12)
    if cls.variant == "hhat2":
        at2v = at12v = LogValue.half_log(rep.a1 * rep.a2)
    return PiecewisePotential(cls.variant, wm.y_type, wm.exact, N, LogValue.of_ratio(h2n1[0]),
                              tail2, tail12, at2v, at12v, f11, cls, wm)
