"""Small helpers for rational arithmetic on numpy object arrays."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np

INT64_SAFE = 2 ** 62


def is_rational(x) -> bool:
    return isinstance(x, (Rational, np.integer))


def to_fraction(x) -> Fraction:
    """Exact conversion; strings like ``"3/2"`` are accepted."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to a fraction")


def fraction_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = to_fraction(v)
    return out


def scale_to_integers(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """Return ``(ints, D)`` with ``arr == ints / D`` and ints Python ints."""
    den = 1
    for v in arr.flat:
        den = math.lcm(den, Fraction(v).denominator)
    ints = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        f = Fraction(v)
        ints[idx] = f.numerator * (den // f.denominator)
    return ints, den


def narrow(ints: np.ndarray, bound: int) -> np.ndarray:
    """Use int64 storage when every intermediate is guaranteed to fit."""
    if bound < INT64_SAFE:
        return ints.astype(np.int64)
    return ints.astype(object)


def log_of(x) -> float:
    """Natural log of a positive int/Fraction/float, safe for huge ints."""
    if isinstance(x, Fraction):
        if x <= 0:
            return -math.inf if x == 0 else math.nan
        return math.log(x.numerator) - math.log(x.denominator)
    if x == 0:
        return -math.inf
    return math.log(x)


def logs_of(arr: np.ndarray, denominator: int = 1) -> np.ndarray:
    """Elementwise ``log(arr / denominator)`` for int64, object or float arrays."""
    if arr.dtype == object:
        out = np.array([log_of(int(v)) for v in arr], dtype=np.float64)
    else:
        with np.errstate(divide="ignore"):
            out = np.log(arr.astype(np.float64))
    if denominator != 1:
        out = out - math.log(denominator)
    return out


def format_fraction(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_real(x: float) -> str:
    return f"{x:.17g}"


def rational_root(value: float, poly_check, max_den: int = 10 ** 6) -> Fraction | None:
    """Snap ``value`` to a nearby rational r and return it if ``poly_check(r)`` holds exactly."""
    if not math.isfinite(value):
        return None
    cand = Fraction(value).limit_denominator(max_den)
    return cand if poly_check(cand) else None


def solve_nullspace(mat: list[list[Fraction]]) -> list[Fraction] | None:
    """One nonzero vector v with mat @ v == 0 (exact Gauss-Jordan), or None."""
    rows = [list(map(Fraction, r)) for r in mat]
    n = len(rows[0])
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                fac = rows[i][c]
                rows[i] = [a - fac * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    v = [Fraction(0)] * n
    v[fc] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -rows[i][fc]
    return v
