"""Weight matrices of a 3-to-2 factor, real Jordan analysis of the 2x2 block
acting on the fiber of 2, and closed forms for the four run patterns.

Notation: M(i, j) = exp(f[ij]) a_ij on the domain; ``M22p`` is M restricted
to rows/columns {2, 3}; z = M(1,2), w = M(1,3), xbar = M(2,1), ybar = M(3,1).
For a pattern of run length n the fiber sum is ``u . M22p^(n-1) . v`` with

========  ===========  ===========
pattern   u            v
========  ===========  ===========
2^n       (1, 1)       (1, 1)
12^n      (z, w)       (1, 1)
2^n1      (1, 1)       (xbar, ybar)
12^n1     (z, w)       (xbar, ybar)
========  ===========  ===========

and with basis P = (a b; c d), ``uP = (s1, s2)`` and ``adj(P) v = (t1, t2)``
the closed forms read ``(s1 t1 alpha^p + s2 t2 beta^p) / det`` (diagonal) and
``(alpha^p (s1 t1 + s2 t2) + p alpha^(p-1) s1 t2) / det`` (Jordan block).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CaseMismatch, SettingCViolation, ZeroMatrix
from .exact import log_of
from .factor import FactorSystem, settingc_profile
from .sft import format_word

PATTERNS = ("2^n", "12^n", "2^n1", "12^n1")
MIN_RUN = {"2^n": 2, "12^n": 1, "2^n1": 1, "12^n1": 1}
FLOAT_TOL = 1e-10


class AmbiguousCaseWarning(UserWarning):
    """A binary64 input sits within tolerance of a degenerate Jordan case."""


@dataclass(frozen=True, eq=False)
class WeightMatrices:
    M: np.ndarray
    exact: bool
    y_type: str

    def entry(self, i: int, j: int):
        return self.M[i - 1, j - 1]

    @property
    def M22p(self) -> np.ndarray:
        return self.M[1:3, 1:3]

    @property
    def z(self):
        return self.M[0, 1]

    @property
    def w(self):
        return self.M[0, 2]

    @property
    def xbar(self):
        return self.M[1, 0]

    @property
    def ybar(self):
        return self.M[2, 0]

    @property
    def f11(self):
        """Weight of the 2-block 11, or None when 11 is not a codomain block."""
        return None if self.y_type == "golden-mean" else self.M[0, 0]

    def block(self, b1: int, b2: int) -> np.ndarray:
        """M_{b1 b2}: entries of M whose 2-block maps to b1 b2, zero elsewhere."""
        fiber = {1: (0,), 2: (1, 2)}
        out = self._zeros()
        for i in fiber[b1]:
            for j in fiber[b2]:
                out[i, j] = self.M[i, j]
        return out

    def _zeros(self) -> np.ndarray:
        if self.exact:
            return np.full((3, 3), Fraction(0), dtype=object)
        return np.zeros((3, 3))

    def vectors(self, pattern: str) -> tuple[tuple, tuple]:
        one = Fraction(1) if self.exact else 1.0
        u = (self.z, self.w) if pattern.startswith("1") else (one, one)
        v = (self.xbar, self.ybar) if pattern.endswith("1") else (one, one)
        return u, v


def weight_matrices(fs: FactorSystem, f) -> WeightMatrices:
    """Weight matrix of ``f`` on a 3-to-2 factor of the supported shape."""
    prof = settingc_profile(fs)
    if not prof.valid:
        raise SettingCViolation(prof.describe())
    M = f.weight_matrix()
    if f.exact:
        M = np.array([[Fraction(x) for x in row] for row in M], dtype=object)
    wm = WeightMatrices(M, f.exact, prof.y_type)
    if wm.z == 0 and wm.w == 0:
        raise SettingCViolation("no 2-block from 1 into the fiber of 2")
    if wm.xbar == 0 and wm.ybar == 0:
        raise SettingCViolation("no 2-block from the fiber of 2 into 1")
    return wm


def block_product(wm: WeightMatrices, y_word: Sequence[int]):
    """Product M_{b1b2} ... M_{b_{n-1}b_n} and its entry sum (= h_n(y))."""
    y = tuple(y_word)
    if len(y) < 2:
        raise ValueError("block products need a word of length >= 2")
    prod = wm.block(y[0], y[1])
    for a, b in zip(y[1:], y[2:]):
        prod = prod.dot(wm.block(a, b))
    total = sum(prod.flat, Fraction(0) if wm.exact else 0.0)
    return prod, total


def _power2(m, p: int):
    """2x2 matrix power by repeated squaring on nested tuples (exact-friendly)."""
    def mul(x, y):
        return ((x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
                (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]))
    one = type(m[0][0])(1)
    zero = type(m[0][0])(0)
    res = ((one, zero), (zero, one))
    base = m
    while p:
        if p & 1:
            res = mul(res, base)
        base = mul(base, base)
        p >>= 1
    return res


def pattern_value(wm: WeightMatrices, pattern: str, n: int):
    """u . M22p^(n-1) . v by direct powering (exact in exact mode)."""
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    if n < MIN_RUN[pattern]:
        raise ValueError(f"pattern {pattern} needs n >= {MIN_RUN[pattern]}")
    m = tuple(tuple(r) for r in wm.M22p)
    pw = _power2(m, n - 1)
    u, v = wm.vectors(pattern)
    return sum(u[i] * pw[i][j] * v[j] for i in range(2) for j in range(2))


def pattern_word(pattern: str, n: int) -> tuple[int, ...]:
    head = (1,) if pattern.startswith("1") else ()
    tail = (1,) if pattern.endswith("^n1") else ()
    return head + (2,) * n + tail


# --------------------------------------------------------------------------
# Jordan analysis

@dataclass(frozen=True)
class Jordan2x2Report:
    """Real Jordan data of a nonnegative 2x2 matrix ``M = P J P^-1``.

    ``basis`` is (a, b, c, d) with P = (a b; c d).  ``alpha`` is the Perron
    root; ``beta`` the other eigenvalue (equal to alpha for repeated roots,
    -alpha for the antidiagonal case).  ``a1``/``a2`` are the off-diagonal
    entries in the antidiagonal case.
    """

    case: str
    alpha: float
    beta: float
    basis: tuple
    a1: object = None
    a2: object = None
    exact: bool = False
    alpha_exact: Fraction | None = None
    beta_exact: Fraction | None = None
    warning: str | None = None
    arrangement: str = ""

    @property
    def eigenvalues(self) -> tuple[float, float]:
        return (self.alpha, self.beta)

    @property
    def det(self):
        a, b, c, d = self.basis
        return a * d - b * c

    def jordan_matrix(self) -> np.ndarray:
        if self.case == "jordan-block":
            return np.array([[self.alpha, 1.0], [0.0, self.alpha]])
        return np.diag([self.alpha, self.beta])

    def basis_matrix(self) -> np.ndarray:
        a, b, c, d = (float(x) for x in self.basis)
        return np.array([[a, b], [c, d]])

    def reconstruct(self) -> np.ndarray:
        P = self.basis_matrix()
        return P @ self.jordan_matrix() @ np.linalg.inv(P)

    def describe(self) -> str:
        if self.case == "antidiagonal":
            head = f"antidiagonal(a1={self.a1}, a2={self.a2}), eigenvalues ±{self.alpha:.17g}"
        elif self.case == "distinct-diagonal":
            head = f"distinct-diagonal(alpha={self.alpha:.17g}, beta={self.beta:.17g})"
        else:
            head = f"{self.case}(alpha={self.alpha:.17g})"
        basis = ", ".join(str(x) for x in self.basis)
        out = f"{head}; basis (a,b,c,d) = ({basis})"
        if self.warning:
            out += f"; warning: {self.warning}"
        return out


def _sqrt_exact(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    return Fraction(rn, rd) if rn * rn == n and rd * rd == d else None


def jordan2x2(M22p, exact: bool | None = None) -> Jordan2x2Report:
    """Classify and decompose a nonnegative 2x2 matrix.

    Degeneracy tests are exact for Fraction input and use a 1e-10 tolerance
    for floats, emitting :class:`AmbiguousCaseWarning` when an input lies
    within tolerance of but not exactly at a degenerate case.
    """
    (p, q), (r, s) = ((M22p[0][0], M22p[0][1]), (M22p[1][0], M22p[1][1]))
    if exact is None:
        exact = all(isinstance(x, (Fraction, int)) for x in (p, q, r, s))
    if exact:
        p, q, r, s = (Fraction(x) for x in (p, q, r, s))
    else:
        p, q, r, s = (float(x) for x in (p, q, r, s))
    if min(p, q, r, s) < 0:
        raise ValueError("matrix must be nonnegative")

    warning = None

    def is_zero(x, scale=1.0):
        nonlocal warning
        if exact:
            return x == 0
        if x == 0:
            return True
        if abs(x) <= FLOAT_TOL * max(1.0, scale):
            warning = "numerically ambiguous case"
            warnings.warn(f"value {x!r} treated as zero", AmbiguousCaseWarning, stacklevel=3)
            return True
        return False

    scale = float(max(abs(p), abs(q), abs(r), abs(s)))
    if all(is_zero(x, scale) for x in (p, q, r, s)):
        raise ZeroMatrix("the fiber-of-2 block is the zero matrix")

    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0

    if is_zero(p, scale) and is_zero(s, scale) and not is_zero(q, scale) and not is_zero(r, scale):
        lam_sq = q * r
        lam_x = _sqrt_exact(lam_sq) if exact else None
        lam = lam_x if lam_x is not None else math.sqrt(float(lam_sq))
        basis = (q, q, lam, -lam)
        return Jordan2x2Report("antidiagonal", float(lam), -float(lam), basis, a1=q, a2=r,
                               exact=exact, alpha_exact=lam_x, warning=warning,
                               arrangement="J = diag(sqrt(a1 a2), -sqrt(a1 a2))")

    tr = p + s
    disc = (p - s) ** 2 + 4 * q * r
    if is_zero(disc, scale * scale):
        alpha = tr / 2
        if is_zero(q, scale) and is_zero(r, scale):
            return Jordan2x2Report("scalar-diagonal", float(alpha), float(alpha),
                                   (one, zero, zero, one), exact=exact,
                                   alpha_exact=alpha if exact else None, warning=warning,
                                   arrangement="J = alpha I")
        # N = M - alpha I is nilpotent and nonzero; P = [N v2, v2]
        n11, n12, n21, n22 = p - alpha, q, r, s - alpha
        v2 = (zero, one) if not (is_zero(n12, scale) and is_zero(n22, scale)) else (one, zero)
        v1 = (n11 * v2[0] + n12 * v2[1], n21 * v2[0] + n22 * v2[1])
        basis = (v1[0], v2[0], v1[1], v2[1])
        return Jordan2x2Report("jordan-block", float(alpha), float(alpha), basis, exact=exact,
                               alpha_exact=alpha if exact else None, warning=warning,
                               arrangement="J = (alpha 1; 0 alpha)")

    root = _sqrt_exact(disc) if exact else None
    if root is None:
        root_f = math.sqrt(float(disc))
        alpha, beta = (float(tr) + root_f) / 2, (float(tr) - root_f) / 2
        pf, qf, rf, sf = float(p), float(q), float(r), float(s)
        is_exact = False
    else:
        alpha, beta = (tr + root) / 2, (tr - root) / 2
        pf, qf, rf, sf = p, q, r, s
        is_exact = True

    q_zero, r_zero = is_zero(q, scale), is_zero(r, scale)

    def eigvec(lam):
        if not q_zero:
            return (qf, lam - pf)
        return (lam - sf, rf)

    if q_zero and r_zero:
        # diagonal with distinct entries: the larger one carries alpha
        e1, e2 = (one, zero), (zero, one)
        (a, c), (b, d) = (e1, e2) if p > s else (e2, e1)
    else:
        (a, c), (b, d) = eigvec(alpha), eigvec(beta)
    return Jordan2x2Report("distinct-diagonal", float(alpha), float(beta), (a, b, c, d),
                           exact=exact, alpha_exact=alpha if is_exact else None,
                           beta_exact=beta if is_exact else None, warning=warning,
                           arrangement="J = diag(alpha, beta), |alpha| > |beta|")


# --------------------------------------------------------------------------
# closed forms

def _coefficients(rep: Jordan2x2Report, wm: WeightMatrices, pattern: str):
    a, b, c, d = rep.basis
    u, v = wm.vectors(pattern)
    if not rep.exact or rep.alpha_exact is None:
        a, b, c, d = (float(x) for x in (a, b, c, d))
        u = tuple(float(x) for x in u)
        v = tuple(float(x) for x in v)
    s1, s2 = u[0] * a + u[1] * c, u[0] * b + u[1] * d
    t1, t2 = d * v[0] - b * v[1], -c * v[0] + a * v[1]
    return s1, s2, t1, t2, a * d - b * c


def _check_case(rep: Jordan2x2Report, wm: WeightMatrices) -> None:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AmbiguousCaseWarning)
        fresh = jordan2x2(wm.M22p, exact=wm.exact)
    if fresh.case != rep.case:
        raise CaseMismatch(f"report case {rep.case} does not describe this matrix ({fresh.case})")


def closed_form(rep: Jordan2x2Report, wm: WeightMatrices, pattern: str, n: int):
    """Fiber sum on the pattern word with run length n from the eigen-data.

    Diagonal and Jordan cases use the eigenvalue formulas; the antidiagonal
    case uses its 2-periodic powers, M^(2k) = (a1 a2)^k I.
    """
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    if n < MIN_RUN[pattern]:
        raise ValueError(f"pattern {pattern} needs n >= {MIN_RUN[pattern]}")
    _check_case(rep, wm)
    p = n - 1
    if rep.case == "antidiagonal":
        u, v = wm.vectors(pattern)
        a1, a2 = rep.a1, rep.a2
        k, odd = divmod(p, 2)
        if odd:
            val = u[0] * a1 * v[1] + u[1] * a2 * v[0]
        else:
            val = u[0] * v[0] + u[1] * v[1]
        return (a1 * a2) ** k * val
    s1, s2, t1, t2, det = _coefficients(rep, wm, pattern)
    al = rep.alpha_exact if (rep.exact and rep.alpha_exact is not None) else rep.alpha
    if rep.case == "jordan-block":
        lin = p * al ** (p - 1) * s1 * t2 if p > 0 else 0
        return (al ** p * (s1 * t1 + s2 * t2) + lin) / det
    if rep.case == "scalar-diagonal":
        return (s1 * t1 + s2 * t2) * al ** p / det
    be = rep.beta_exact if (rep.exact and rep.beta_exact is not None) else rep.beta
    return (s1 * t1 * al ** p + s2 * t2 * be ** p) / det


# --------------------------------------------------------------------------
# limits

S_TEXT = {"2^n": "(a+c)", "12^n": "(az+cw)", "2^n1": "(a+c)", "12^n1": "(az+cw)"}
T1_TEXT = {"2^n": "(d-b)", "12^n": "(d-b)", "2^n1": "(d xbar-b ybar)", "12^n1": "(d xbar-b ybar)"}
T2_TEXT = {"2^n": "(a-c)", "12^n": "(a-c)", "2^n1": "(-c xbar+a ybar)", "12^n1": "(-c xbar+a ybar)"}


@dataclass(frozen=True)
class LimitValue:
    """A limit of log-ratios; ``value`` is None when the limit does not exist."""

    value: float | None
    condition: str
    ratio: Fraction | None = None

    @property
    def exists(self) -> bool:
        return self.value is not None

    def describe(self) -> str:
        if self.value is None:
            return f"does not exist ({self.condition})"
        return f"{self.value:.17g} ({self.condition})"


@dataclass(frozen=True)
class RatioLimits:
    """Limits feeding the piecewise potential.

    at_21: log h[21]; tail_2n1: lim log(h[2^n1]/h[2^(n-1)1]); tail_12n1:
    lim log(h[12^n1]/h[2^n1]); at_2inf: lim log(h[2^(n+1)]/h[2^n]); at_12inf:
    lim log(h[12^n]/h[2^n]); at_1inf: f[11] (None when 11 is not allowed).
    """

    at_21: LimitValue
    tail_2n1: LimitValue
    tail_12n1: LimitValue
    at_2inf: LimitValue
    at_12inf: LimitValue
    at_1inf: LimitValue | None

    def as_dict(self) -> dict:
        return {"[21]": self.at_21, "[2^n1] tail": self.tail_2n1, "[12^n1] tail": self.tail_12n1,
                "2^inf": self.at_2inf, "12^inf": self.at_12inf, "1^inf": self.at_1inf}


def _is_zero(x, exact) -> bool:
    return x == 0 if exact else abs(float(x)) <= FLOAT_TOL


def _leading(rep, wm, pattern):
    """(coefficient, base, polynomial degree, condition) of the dominant term."""
    s1, s2, t1, t2, det = _coefficients(rep, wm, pattern)
    exact = rep.exact and rep.alpha_exact is not None
    al = rep.alpha_exact if exact else rep.alpha
    if rep.case == "jordan-block":
        lin = s1 * t2
        cond = f"{S_TEXT[pattern]}{T2_TEXT[pattern]}"
        if not _is_zero(lin, exact):
            return lin / (al * det), al, 1, cond + " != 0"
        return (s1 * t1 + s2 * t2) / det, al, 0, cond + " = 0"
    if rep.case == "scalar-diagonal":
        return (s1 * t1 + s2 * t2) / det, al, 0, "scalar"
    c1 = s1 * t1
    cond = f"{S_TEXT[pattern]}{T1_TEXT[pattern]}"
    if not _is_zero(c1, exact):
        return c1 / det, al, 0, cond + " != 0"
    be = rep.beta_exact if exact else rep.beta
    return s2 * t2 / det, be, 0, cond + " = 0"


def _log_ratio(x, exact):
    if exact and isinstance(x, Fraction):
        return LimitValue(log_of(x), "", x)
    return LimitValue(math.log(float(x)), "")


def _alt_ratio(rep, wm, num_pat, den_pat, shift):
    """Even/odd limits of num(p + shift)/den(p) for the 2-periodic antidiagonal case."""
    vals = []
    for p in (2, 3):
        vals.append(Fraction(closed_form(rep, wm, num_pat, p + shift + 1))
                    / Fraction(closed_form(rep, wm, den_pat, p + 1))
                    if wm.exact else
                    float(closed_form(rep, wm, num_pat, p + shift + 1))
                    / float(closed_form(rep, wm, den_pat, p + 1)))
    return vals


def ratio_limits(rep: Jordan2x2Report, wm: WeightMatrices) -> RatioLimits:
    """The limit values of the piecewise potential with the case that produced each."""
    _check_case(rep, wm)
    exact = wm.exact
    h21 = wm.xbar + wm.ybar
    at21 = LimitValue(log_of(h21), "h[21] = xbar + ybar", h21 if exact else None)
    f11 = wm.f11
    at1 = None if f11 is None else LimitValue(log_of(f11), "f[11]", f11 if exact else None)

    if rep.case == "antidiagonal":
        def alt(num, den, shift, label, cond_text):
            even, odd = _alt_ratio(rep, wm, num, den, shift)
            equal = even == odd if exact else abs(float(even) - float(odd)) <= FLOAT_TOL * abs(float(even))
            if equal:
                lv = _log_ratio(even, exact)
                return LimitValue(lv.value, cond_text + " holds", lv.ratio)
            return LimitValue(None, f"{label} ratios alternate {float(even):.17g}, {float(odd):.17g}")
        a_eq = "a1 = a2"
        return RatioLimits(
            at21,
            alt("2^n1", "2^n1", 1, "[2^n1]", "a1 = a2 or a2 xbar^2 = a1 ybar^2"),
            alt("12^n1", "2^n1", 0, "[12^n1]", "even/odd agreement"),
            alt("2^n", "2^n", 1, "2^inf", a_eq),
            alt("12^n", "2^n", 0, "12^inf", "a1 = a2 or z = w"),
            at1,
        )

    def growth(pattern):
        c, base, deg, cond = _leading(rep, wm, pattern)
        if (exact and base == 0) or (not exact and float(base) <= 0):
            return LimitValue(None, "nonpositive dominant eigenvalue")
        lv = _log_ratio(base, exact and isinstance(base, Fraction))
        return LimitValue(lv.value, cond, lv.ratio)

    def quotient(num, den):
        cn, bn, dn, cond_n = _leading(rep, wm, num)
        cd, bd, dd, _ = _leading(rep, wm, den)
        if bn != bd or dn != dd:
            return LimitValue(None, f"dominant terms differ ({cond_n})")
        q = cn / cd
        lv = _log_ratio(q, exact and isinstance(q, Fraction))
        return LimitValue(lv.value, cond_n, lv.ratio)

    return RatioLimits(at21, growth("2^n1"), quotient("12^n1", "2^n1"),
                       growth("2^n"), quotient("12^n", "2^n"), at1)


def describe_word(pattern: str, n: int) -> str:
    return format_word(pattern_word(pattern, n))
