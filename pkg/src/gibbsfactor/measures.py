"""Markov measures, their pushforwards through a factor map, and Gibbs diagnostics.

A diagnostic compares log mu[w] + n P with a reference log-weight of the
word (a Birkhoff word sum, a sequence value, or an interval of Birkhoff sums
of a piecewise potential) and records the extremes of the difference per
length n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NotIrreducible, NotStochastic, SupportMismatch
from .exact import fraction_array, format_fraction, format_real, log_of, rational_root, solve_nullspace
from .factor import FactorSystem, identity_factor
from .sequences import TwoBlockPotential, _fiber_start, sublinear_growth
from .sft import TransitionSystem, Word, is_irreducible
from .tables import WordTable, decode, fiber_table

STOCHASTIC_TOL = 1e-12
GIBBS_BAND_TOL = 1e-6
WEAK_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    """Stationary Markov measure: mu[x_1..x_n] = p_{x_1} P_{x_1x_2} ... P_{x_{n-1}x_n}."""

    system: TransitionSystem
    stochastic: np.ndarray
    stationary: np.ndarray
    exact: bool

    def mass(self, word: Sequence[int]):
        w = tuple(word)
        if not self.system.allows(w):
            return Fraction(0) if self.exact else 0.0
        m = self.stationary[w[0] - 1]
        for a, b in zip(w, w[1:]):
            m = m * self.stochastic[a - 1, b - 1]
        return m

    def describe(self) -> str:
        fmt = format_fraction if self.exact else format_real
        rows = "; ".join(" ".join(fmt(x) for x in row) for row in self.stochastic)
        return f"P = ({rows}); p = ({' '.join(fmt(x) for x in self.stationary)})"


def _exact_matrix(stochastic) -> bool:
    return all(isinstance(x, (Fraction, int)) for x in np.asarray(stochastic, dtype=object).flat)


def _stationary_exact(P: np.ndarray) -> np.ndarray:
    k = P.shape[0]
    # p (P - I) = 0  <=>  (P - I)^T p^T = 0
    mat = [[P[j, i] - (1 if i == j else 0) for j in range(k)] for i in range(k)]
    v = solve_nullspace(mat)
    total = sum(v)
    return np.array([x / total for x in v], dtype=object)


def _stationary_float(P: np.ndarray) -> np.ndarray:
    k = P.shape[0]
    lazy = 0.5 * (P + np.eye(k))
    p = np.full(k, 1.0 / k)
    for _ in range(100000):
        nxt = p @ lazy
        if np.abs(nxt - p).max() < 1e-14:
            p = nxt
            break
        p = nxt
    return p / p.sum()


def markov_measure(system: TransitionSystem, stochastic) -> MarkovMeasure:
    """Validate ``stochastic`` against ``system`` and compute its stationary vector.

    Exact (linear solve) when every entry is rational, otherwise power
    iteration on the lazy chain to 1e-14.
    """
    exact = _exact_matrix(stochastic)
    P = fraction_array(stochastic) if exact else np.asarray(stochastic, dtype=np.float64)
    k = system.k
    if P.shape != (k, k):
        raise SupportMismatch(f"stochastic matrix must be {k}x{k}")
    for i in range(k):
        for j in range(k):
            if (P[i, j] != 0) != system.allowed(i + 1, j + 1):
                raise SupportMismatch(f"P[{i + 1},{j + 1}] = {P[i, j]} does not match a_ij")
            if P[i, j] < 0:
                raise NotStochastic("negative entry")
        total = sum(P[i]) if exact else float(P[i].sum())
        if (exact and total != 1) or (not exact and abs(total - 1) > STOCHASTIC_TOL):
            raise NotStochastic(f"row {i + 1} sums to {total}")
    if not is_irreducible(system):
        raise NotIrreducible("stationary vector is not unique on a reducible system")
    p = _stationary_exact(P) if exact else _stationary_float(P)
    return MarkovMeasure(system, P, p, exact)


@dataclass(frozen=True)
class PerronData:
    root: object  # Fraction when rational, else float
    right: np.ndarray
    exact: bool

    @property
    def log_root(self) -> float:
        return log_of(self.root)


def perron(M: np.ndarray) -> PerronData:
    """Perron root and positive right eigenvector; exact when the root is rational."""
    exact = M.dtype == object
    Mf = np.array(M, dtype=np.float64)
    vals, vecs = np.linalg.eig(Mf)
    i = int(np.argmax(vals.real))
    lam = float(vals[i].real)
    if exact:
        k = M.shape[0]

        def singular(c):
            return solve_nullspace([[M[r, s] - (c if r == s else 0) for s in range(k)]
                                    for r in range(k)]) is not None

        root = rational_root(lam, singular)
        if root is not None:
            v = solve_nullspace([[M[r, s] - (root if r == s else 0) for s in range(k)]
                                 for r in range(k)])
            if all(x >= 0 for x in v) or all(x <= 0 for x in v):
                v = [abs(x) for x in v]
                return PerronData(root, np.array(v, dtype=object), True)
    v = np.abs(vecs[:, i].real)
    return PerronData(lam, v / v.max(), False)


def _chain_from_weights(system: TransitionSystem, M: np.ndarray) -> tuple[MarkovMeasure, PerronData]:
    if not is_irreducible(system):
        raise NotIrreducible("Perron construction needs an irreducible system")
    pd = perron(M)
    k = system.k
    if pd.exact:
        P = np.empty((k, k), dtype=object)
        for i in range(k):
            for j in range(k):
                P[i, j] = M[i, j] * pd.right[j] / (pd.root * pd.right[i])
    else:
        Mf = np.array(M, dtype=np.float64)
        v = np.asarray(pd.right, dtype=np.float64)
        P = Mf * v[None, :] / (pd.root * v[:, None])
        P = P / P.sum(axis=1, keepdims=True)
    return markov_measure(system, P), pd


def parry_measure(system: TransitionSystem) -> MarkovMeasure:
    """Measure of maximal entropy: P_ij = a_ij v_j / (lambda v_i)."""
    M = np.array([[Fraction(x) for x in row] for row in system.transitions], dtype=object)
    return _chain_from_weights(system, M)[0]


def gibbs_from_potential(system: TransitionSystem, f: TwoBlockPotential) -> tuple[MarkovMeasure, float]:
    """Markov Gibbs measure of a two-block potential and its pressure log(rho(M))."""
    if f.system != system:
        raise ValueError("potential lives on another system")
    mu, pd = _chain_from_weights(system, f.weight_matrix())
    return mu, pd.log_root


def pushforward(fs: FactorSystem, mu: MarkovMeasure, N: int, backend=None) -> WordTable:
    """Cylinder masses of the image measure on every codomain word up to length N."""
    start = _fiber_start(fs, mu.exact, list(mu.stationary))
    tail = (np.array([Fraction(1)] * fs.domain.k, dtype=object) if mu.exact
            else np.ones(fs.domain.k))
    return fiber_table(fs, mu.stochastic, start, tail, N, "measure", mu.exact, backend=backend)


def cylinder_table(mu: MarkovMeasure, N: int) -> WordTable:
    """Masses of the measure itself (the identity factor)."""
    return pushforward(identity_factor(mu.system), mu, N)


# --------------------------------------------------------------------------
# diagnostics

@dataclass(frozen=True, eq=False)
class GibbsDiagnostics:
    """Per-length extremes of ``log mu[w] + nP - reference(w)``.

    ``classification`` is ``gibbs``, ``weak-gibbs`` or ``fail``; ``constant``
    is max |defect| over all lengths.  ``best_fit_P`` is the pressure that
    removes the linear trend of the band centre.
    """

    pressure_used: float
    lengths: tuple[int, ...]
    max_defect: tuple[float, ...]
    min_defect: tuple[float, ...]
    classification: str
    constant: float
    best_fit_P: float
    worst_word: Word | None = None

    def abs_defect(self, n: int) -> float:
        i = self.lengths.index(n)
        return max(abs(self.max_defect[i]), abs(self.min_defect[i]))

    def band_variation(self, lo: int, hi: int) -> float:
        """Largest change of the max/min defect over lengths lo..hi."""
        idx = [i for i, n in enumerate(self.lengths) if lo <= n <= hi]
        mx = [self.max_defect[i] for i in idx]
        mn = [self.min_defect[i] for i in idx]
        return max(max(mx) - min(mx), max(mn) - min(mn))

    def describe(self) -> str:
        if self.classification == "gibbs":
            head = f"gibbs(C={format_real(self.constant)})"
        elif self.classification == "weak-gibbs":
            n = self.lengths[-1]
            head = (f"weak-gibbs(max|defect|(n)/n = {format_real(self.abs_defect(n) / n)} "
                    f"at n={n}, decreasing)")
        else:
            head = "fail"
        return (f"{head}; pressure {format_real(self.pressure_used)}; "
                f"best-fit pressure {format_real(self.best_fit_P)}")

    def to_csv(self) -> str:
        lines = ["n,max_defect,min_defect"]
        for n, a, b in zip(self.lengths, self.max_defect, self.min_defect):
            lines.append(f"{n},{format_real(a)},{format_real(b)}")
        return "\n".join(lines) + "\n"


def _classify(lengths, mx, mn) -> tuple[str, float]:
    """gibbs: the band over n in [N/2, N] moves by < 1e-6.

    weak-gibbs: max|defect|(n)/n is non-increasing over the last two thirds
    and either below 1e-3 at n = N or growing sublinearly.
    """
    N = lengths[-1]
    absd = [max(abs(a), abs(b)) for a, b in zip(mx, mn)]
    C = max(absd)
    idx = [i for i, n in enumerate(lengths) if n >= N / 2]
    if len(idx) >= 2:
        var = max(max(mx[i] for i in idx) - min(mx[i] for i in idx),
                  max(mn[i] for i in idx) - min(mn[i] for i in idx))
        if var < GIBBS_BAND_TOL:
            return "gibbs", C
    per = np.array([d / n for d, n in zip(absd, lengths)])
    tail = per[len(per) // 3:]
    trend = len(tail) >= 2 and bool(np.all(np.diff(tail) <= 1e-12))
    sublinear = sublinear_growth(absd)
    if trend and (per[-1] < WEAK_TOL or sublinear):
        return "weak-gibbs", C
    return "fail", C


def _best_fit(lengths, mx, mn, P) -> float:
    if len(lengths) < 2:
        return P
    centre = [(a + b) / 2 for a, b in zip(mx, mn)]
    slope = np.polyfit(np.array(lengths, dtype=float), np.array(centre), 1)[0]
    return float(P - slope)


def _diagnose(table: WordTable, P: float, N: int, reference) -> GibbsDiagnostics:
    """``reference(n)`` gives arrays (lo, hi) of reference log-weights of the level-n words."""
    lengths, mx, mn = [], [], []
    worst, wword = -1.0, None
    for n in range(1, N + 1):
        r_lo, r_hi = reference(n)
        lm = np.asarray(table.logs[n - 1], dtype=np.float64) + n * P
        d_hi, d_lo = lm - r_lo, lm - r_hi
        a = np.fmax(np.abs(d_hi), np.abs(d_lo))
        i = int(np.argmax(a))
        if a[i] > worst:
            worst, wword = float(a[i]), decode(int(table.codes[n - 1][i]), n, table.alphabet_size)
        lengths.append(n)
        mx.append(float(d_hi.max()))
        mn.append(float(d_lo.min()))
    cls, C = _classify(lengths, mx, mn)
    return GibbsDiagnostics(P, tuple(lengths), tuple(mx), tuple(mn), cls, C,
                            _best_fit(lengths, mx, mn, P), wword)


def check_gibbs_on_domain(mu: MarkovMeasure, f: TwoBlockPotential, P: float, N: int) -> GibbsDiagnostics:
    """Defects of log mu[w] + nP - (f[w_1w_2] + ... + f[w_{n-1}w_n]) over B_n(X), n <= N."""
    table = cylinder_table(mu, N)

    def ref(n):
        s = f.word_sums(table.digits(n))
        return s, s

    return _diagnose(table, P, N, ref)


def gibbs_diagnostics_vs_sequence(table: WordTable, seq: WordTable, P: float, N: int | None = None) -> GibbsDiagnostics:
    """Defects of log nu[y] + nP - log f_n(y) for a sequence table (h or g)."""
    N = min(table.depth, seq.depth) if N is None else N
    if N > table.depth or N > seq.depth:
        raise ValueError("tables are not deep enough")

    def ref(n):
        if np.array_equal(table.codes[n - 1], seq.codes[n - 1]):
            v = np.asarray(seq.logs[n - 1], dtype=np.float64)
        else:
            v = np.array([seq.log_value(w) for w in table.words(n)])
        return v, v

    return _diagnose(table, P, N, ref)


def gibbs_diagnostics_vs_potential(table: WordTable, pp, P: float, N: int | None = None) -> GibbsDiagnostics:
    """Defect intervals log nu[y] + nP - [lo, hi] with [lo, hi] the Birkhoff interval of ``pp``."""
    N = table.depth if N is None else N

    def ref(n):
        iv = np.array([pp.birkhoff_interval(w) for w in table.words(n)])
        return iv[:, 0], iv[:, 1]

    return _diagnose(table, P, N, ref)


def weight_pressure(f: TwoBlockPotential) -> float:
    """log of the spectral radius of the domain weight matrix."""
    return perron(f.weight_matrix()).log_root


def measure_to_csv(table: WordTable) -> str:
    return table.to_csv(header="mass")


def bernoulli(system: TransitionSystem, probs: Sequence) -> MarkovMeasure:
    """i.i.d. measure on a full shift."""
    if not system.is_full_shift():
        raise SupportMismatch("Bernoulli measures need a full shift")
    row = list(probs)
    return markov_measure(system, [row for _ in system.symbols])
