"""Reference (numpy) implementations of the hot loops.

Both functions accept any numpy dtype, so the exact-arithmetic path (int64
or object arrays of Python ints) always runs here.  ``_ckernels`` mirrors
the float64 signatures.
"""
import numpy as np


def fiber_levels(ytrans, wblocks, init, tail, depth):
    """Fiber-sum dynamic programme over all codomain words up to ``depth``.

    Parameters
    ----------
    ytrans : (kY, kY) int array, codomain transitions.
    wblocks : (kY, kX, kX) array; ``wblocks[b]`` is the domain weight matrix
        with columns outside the fiber of symbol b+1 zeroed.
    init : (kY, kX) array; starting vector for words beginning with b+1.
    tail : (kX,) array contracted with the fiber vector to give a value.
    depth : maximal word length.

    Returns
    -------
    list of (codes, values) per length 1..depth; codes are base-kY integers
    (symbol s encoded as digit s-1) in increasing, i.e. lexicographic, order.
    """
    ky = ytrans.shape[0]
    codes = np.arange(ky, dtype=np.int64)
    last = np.arange(ky, dtype=np.int64)
    vec = np.array(init)
    out = [(codes, vec @ tail)]
    for _ in range(depth - 1):
        new_codes, new_last, new_vec = [], [], []
        for b in range(ky):
            sel = ytrans[last, b] != 0
            if not sel.any():
                continue
            new_codes.append(codes[sel] * ky + b)
            new_last.append(np.full(int(sel.sum()), b, dtype=np.int64))
            new_vec.append(vec[sel] @ wblocks[b])
        codes = np.concatenate(new_codes)
        order = np.argsort(codes, kind="stable")
        codes = codes[order]
        last = np.concatenate(new_last)[order]
        vec = np.concatenate(new_vec)[order]
        out.append((codes, vec @ tail))
    return out


def defect_extremes(codes, logs, ky, depth):
    """Signed additivity defects over all split points.

    ``codes[L-1]`` / ``logs[L-1]`` hold level L.  Returns two (depth+1,
    depth+1) float arrays ``hi`` and ``lo`` with ``hi[n, m]`` the maximum
    and ``lo[n, m]`` the minimum over words y of length n+m of
    ``log f(y) - log f(y[:n]) - log f(y[n:])``.  Entries with n+m > depth
    or a zero index are NaN.
    """
    hi = np.full((depth + 1, depth + 1), np.nan)
    lo = np.full((depth + 1, depth + 1), np.nan)
    for total in range(2, depth + 1):
        c = codes[total - 1]
        lg = logs[total - 1]
        for n in range(1, total):
            m = total - n
            base = ky ** m
            ip = np.searchsorted(codes[n - 1], c // base)
            isf = np.searchsorted(codes[m - 1], c % base)
            d = lg - logs[n - 1][ip] - logs[m - 1][isf]
            hi[n, m] = d.max()
            lo[n, m] = d.min()
    return hi, lo
