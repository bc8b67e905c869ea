# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float64 versions of the loops in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def fiber_levels(ytrans, wblocks, init, tail, int depth):
    cdef const cnp.int64_t[:, :] yt = np.ascontiguousarray(ytrans, dtype=np.int64)
    cdef const double[:, :, :] wb = np.ascontiguousarray(wblocks, dtype=np.float64)
    cdef const double[:] tl = np.ascontiguousarray(tail, dtype=np.float64)
    cdef Py_ssize_t ky = yt.shape[0]
    cdef Py_ssize_t kx = wb.shape[1]
    cdef Py_ssize_t n, p, b, i, j, child, count
    cdef double acc

    cdef cnp.int64_t[:] codes = np.arange(ky, dtype=np.int64)
    cdef cnp.int64_t[:] last = np.arange(ky, dtype=np.int64)
    cdef double[:, :] vec = np.array(init, dtype=np.float64, order="C")
    cdef cnp.int64_t[:] outdeg = np.zeros(ky, dtype=np.int64)
    cdef cnp.int64_t[:] ncodes
    cdef cnp.int64_t[:] nlast
    cdef double[:, :] nvec
    cdef double[:] vals

    for b in range(ky):
        for j in range(ky):
            outdeg[b] += yt[b, j] != 0

    vals = np.empty(ky)
    for p in range(ky):
        acc = 0.0
        for i in range(kx):
            acc += vec[p, i] * tl[i]
        vals[p] = acc
    out = [(np.asarray(codes).copy(), np.asarray(vals))]

    for n in range(1, depth):
        count = 0
        for p in range(codes.shape[0]):
            count += outdeg[last[p]]
        ncodes = np.empty(count, dtype=np.int64)
        nlast = np.empty(count, dtype=np.int64)
        nvec = np.zeros((count, kx))
        vals = np.empty(count)
        child = 0
        for p in range(codes.shape[0]):
            for b in range(ky):
                if yt[last[p], b] == 0:
                    continue
                ncodes[child] = codes[p] * ky + b
                nlast[child] = b
                for j in range(kx):
                    acc = 0.0
                    for i in range(kx):
                        acc += vec[p, i] * wb[b, i, j]
                    nvec[child, j] = acc
                acc = 0.0
                for j in range(kx):
                    acc += nvec[child, j] * tl[j]
                vals[child] = acc
                child += 1
        codes, last, vec = ncodes, nlast, nvec
        out.append((np.asarray(codes), np.asarray(vals)))
    return out


cdef inline Py_ssize_t _walk(const cnp.int64_t[:] arr, cnp.int64_t key, Py_ssize_t pos) nogil:
    # keys arrive sorted, or sorted within blocks: restart only when a key drops
    if pos >= arr.shape[0] or arr[pos] > key:
        pos = 0
    while pos + 1 < arr.shape[0] and arr[pos] < key:
        pos += 1
    return pos


def defect_extremes(codes, logs, int ky, int depth):
    hi_arr = np.full((depth + 1, depth + 1), np.nan)
    lo_arr = np.full((depth + 1, depth + 1), np.nan)
    cdef double[:, :] hi = hi_arr
    cdef double[:, :] lo = lo_arr
    cdef const cnp.int64_t[:] cl, cn, cm
    cdef const double[:] ll, ln, lm
    cdef Py_ssize_t total, n, m, y, ip, isf
    cdef cnp.int64_t base, c
    cdef double d, dmax, dmin
    for total in range(2, depth + 1):
        cl = codes[total - 1]
        ll = logs[total - 1]
        for n in range(1, total):
            m = total - n
            cn = codes[n - 1]
            cm = codes[m - 1]
            ln = logs[n - 1]
            lm = logs[m - 1]
            base = 1
            for y in range(m):
                base *= ky
            dmax = -1e308
            dmin = 1e308
            ip = 0
            isf = 0
            with nogil:
                for y in range(cl.shape[0]):
                    c = cl[y]
                    ip = _walk(cn, c // base, ip)
                    isf = _walk(cm, c % base, isf)
                    d = ll[y] - ln[ip] - lm[isf]
                    if d > dmax:
                        dmax = d
                    if d < dmin:
                        dmin = d
            hi[n, m] = dmax
            lo[n, m] = dmin
    return hi_arr, lo_arr
