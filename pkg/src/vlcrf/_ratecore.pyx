# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for precoder refits and rate evaluation.

Mirrors the NumPy fallback module: a Cholesky-based solver for the
zero-forcing columns (minimum-norm when the stacked system is wide,
least-squares when it is tall), a fused pairwise gain table, and the
per-user rate reduction. The solvers return a success flag instead of
raising, so the dispatch layer can fall back to the SVD pseudo-inverse
on rank-deficient stacks.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log2, sqrt

cnp.import_array()

cdef double SINR_CLAMP = 1.0e30

# Factorization guard. The zero-forcing Grams arrive equilibrated to a
# unit diagonal, so a Schur-complement pivot falling below GUARD**2
# means cond(Gram) is at least ~1/GUARD**2 ~ 4e4 and the
# normal-equations residual eps * cond can no longer be trusted to a
# comfortable margin below 1e-9. Failing the factorization hands such
# groups to the caller's SVD-based fallback, which solves the stacked
# system directly and does not square the conditioning.
cdef double PIVOT_RTOL = 2.5e-5


cdef inline double _rate_term(double direct, double interference,
                              double noise, double bw) nogil:
    cdef double gamma = direct / (interference + noise)
    if gamma > SINR_CLAMP:
        gamma = SINR_CLAMP
    return bw * log2(1.0 + gamma)


def per_user_rates(double[:, ::1] gv, double[:, ::1] gr,
                   unsigned char[::1] b, double nv, double nr,
                   double bwv, double bwr):
    """Rates of all users under association vector b, in bits/s."""
    cdef Py_ssize_t n = b.shape[0]
    out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j, l
    cdef double acc
    with nogil:
        for j in range(n):
            acc = 0.0
            if b[j]:
                for l in range(n):
                    if l != j and b[l]:
                        acc += gv[j, l]
                out[j] = _rate_term(gv[j, j], acc, nv, bwv)
            else:
                for l in range(n):
                    if l != j and not b[l]:
                        acc += gr[j, l]
                out[j] = _rate_term(gr[j, j], acc, nr, bwr)
    return out_arr


def gain_table_real(double[:, ::1] h, double[:, ::1] w,
                    double power, double scale):
    """G[j, l] = scale * power * (h_j . w_l)^2 for a real channel."""
    cdef Py_ssize_t nu = h.shape[0]
    cdef Py_ssize_t na = h.shape[1]
    cdef Py_ssize_t nc = w.shape[1]
    out_arr = np.empty((nu, nc))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t j, l, i
    cdef double acc
    cdef double c = scale * power
    with nogil:
        for j in range(nu):
            for l in range(nc):
                acc = 0.0
                for i in range(na):
                    acc += h[j, i] * w[i, l]
                out[j, l] = c * acc * acc
    return out_arr


def gain_table_complex(double complex[:, ::1] h, double complex[:, ::1] w,
                       double power, double scale):
    """G[j, l] = scale * power * |h_j . w_l|^2 for a complex channel."""
    cdef Py_ssize_t nu = h.shape[0]
    cdef Py_ssize_t na = h.shape[1]
    cdef Py_ssize_t nc = w.shape[1]
    out_arr = np.empty((nu, nc))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t j, l, i
    cdef double complex acc
    cdef double c = scale * power
    with nogil:
        for j in range(nu):
            for l in range(nc):
                acc = 0.0
                for i in range(na):
                    acc = acc + h[j, i] * w[i, l]
                out[j, l] = c * (acc.real * acc.real + acc.imag * acc.imag)
    return out_arr


cdef int _cholesky_real(double[:, ::1] a) nogil:
    """In-place lower Cholesky factor; 0 on a non-positive pivot."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, p
    cdef double acc
    cdef double scale = 0.0
    for i in range(n):
        if a[i, i] > scale:
            scale = a[i, i]
    if scale <= 0.0:
        return 0
    for j in range(n):
        acc = a[j, j]
        for p in range(j):
            acc -= a[j, p] * a[j, p]
        if acc <= scale * PIVOT_RTOL:
            return 0
        a[j, j] = sqrt(acc)
        for i in range(j + 1, n):
            acc = a[i, j]
            for p in range(j):
                acc -= a[i, p] * a[j, p]
            a[i, j] = acc / a[j, j]
    return 1


cdef int _cholesky_complex(double complex[:, ::1] a) nogil:
    """In-place lower Cholesky of a Hermitian matrix; 0 on failure."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, p
    cdef double complex acc
    cdef double diag
    cdef double scale = 0.0
    for i in range(n):
        if a[i, i].real > scale:
            scale = a[i, i].real
    if scale <= 0.0:
        return 0
    for j in range(n):
        diag = a[j, j].real
        for p in range(j):
            diag -= (a[j, p].real * a[j, p].real
                     + a[j, p].imag * a[j, p].imag)
        if diag <= scale * PIVOT_RTOL:
            return 0
        diag = sqrt(diag)
        a[j, j] = diag
        for i in range(j + 1, n):
            acc = a[i, j]
            for p in range(j):
                acc = acc - a[i, p] * a[j, p].conjugate()
            a[i, j] = acc / diag
    return 1


cdef void _chol_solve_real(double[:, ::1] l, double[::1] y) nogil:
    """Solve (L L^T) x = y in place given the lower factor L."""
    cdef Py_ssize_t n = l.shape[0]
    cdef Py_ssize_t i, p
    cdef double acc
    for i in range(n):
        acc = y[i]
        for p in range(i):
            acc -= l[i, p] * y[p]
        y[i] = acc / l[i, i]
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for p in range(i + 1, n):
            acc -= l[p, i] * y[p]
        y[i] = acc / l[i, i]


cdef void _chol_solve_complex(double complex[:, ::1] l,
                              double complex[::1] y) nogil:
    """Solve (L L^H) x = y in place given the lower factor L."""
    cdef Py_ssize_t n = l.shape[0]
    cdef Py_ssize_t i, p
    cdef double complex acc
    for i in range(n):
        acc = y[i]
        for p in range(i):
            acc = acc - l[i, p] * y[p]
        y[i] = acc / l[i, i].real
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for p in range(i + 1, n):
            acc = acc - l[p, i].conjugate() * y[p]
        y[i] = acc / l[i, i].real


def zf_solve_real(double[:, ::1] stacked, cnp.int64_t[::1] positions):
    """Zero-forcing solution columns of a real stack.

    Returns (w, ok) with w of shape (n, len(positions)). Column t is
    the minimum-norm (m <= n) or least-squares (m > n) solution of
    stacked @ x = e_{positions[t]}, computed through a Cholesky
    factorization of the smaller Gram matrix. The Gram system is
    equilibrated to unit diagonal first, which changes neither
    solution (row scaling preserves the constraint set of the
    minimum-norm problem; column scaling is a change of variables in
    the least-squares problem) but keeps weak rows or columns from
    wrecking the conditioning. ok is False when a zero norm or a
    collapsing pivot is met, in which case w must be discarded.
    """
    cdef Py_ssize_t m = stacked.shape[0]
    cdef Py_ssize_t n = stacked.shape[1]
    cdef Py_ssize_t k = positions.shape[0]
    cdef Py_ssize_t g = m if m <= n else n
    out_arr = np.zeros((n, k))
    gram_arr = np.empty((g, g))
    work_arr = np.empty(g)
    scale_arr = np.empty(g)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] gram = gram_arr
    cdef double[::1] work = work_arr
    cdef double[::1] d = scale_arr
    cdef Py_ssize_t i, j, p, t
    cdef double acc
    cdef int ok = 1
    with nogil:
        if m <= n:
            # Minimum-norm route: x = S^T (S S^T)^{-1} e.
            for i in range(m):
                acc = 0.0
                for p in range(n):
                    acc += stacked[i, p] * stacked[i, p]
                if acc <= 0.0:
                    ok = 0
                    break
                d[i] = 1.0 / sqrt(acc)
            if ok:
                for i in range(m):
                    for j in range(i + 1):
                        acc = 0.0
                        for p in range(n):
                            acc += stacked[i, p] * stacked[j, p]
                        gram[i, j] = acc * d[i] * d[j]
                ok = _cholesky_real(gram)
            if ok:
                for t in range(k):
                    for i in range(m):
                        work[i] = 1.0 if i == positions[t] else 0.0
                    _chol_solve_real(gram, work)
                    for i in range(n):
                        acc = 0.0
                        for j in range(m):
                            acc += stacked[j, i] * d[j] * work[j]
                        out[i, t] = acc * d[positions[t]]
        else:
            # Least-squares route: x = (S^T S)^{-1} S^T e.
            for i in range(n):
                acc = 0.0
                for p in range(m):
                    acc += stacked[p, i] * stacked[p, i]
                if acc <= 0.0:
                    ok = 0
                    break
                d[i] = 1.0 / sqrt(acc)
            if ok:
                for i in range(n):
                    for j in range(i + 1):
                        acc = 0.0
                        for p in range(m):
                            acc += stacked[p, i] * stacked[p, j]
                        gram[i, j] = acc * d[i] * d[j]
                ok = _cholesky_real(gram)
            if ok:
                for t in range(k):
                    for i in range(n):
                        work[i] = stacked[positions[t], i] * d[i]
                    _chol_solve_real(gram, work)
                    for i in range(n):
                        out[i, t] = work[i] * d[i]
    return out_arr, ok != 0


def zf_solve_complex(double complex[:, ::1] stacked,
                     cnp.int64_t[::1] positions):
    """Zero-forcing solution columns of a complex stack.

    Same contract as the real variant with Hermitian Gram matrices:
    the minimum-norm route is x = S^H (S S^H)^{-1} e and the
    least-squares route is x = (S^H S)^{-1} S^H e, both solved after
    equilibrating the Gram diagonal to one.
    """
    cdef Py_ssize_t m = stacked.shape[0]
    cdef Py_ssize_t n = stacked.shape[1]
    cdef Py_ssize_t k = positions.shape[0]
    cdef Py_ssize_t g = m if m <= n else n
    out_arr = np.zeros((n, k), dtype=np.complex128)
    gram_arr = np.empty((g, g), dtype=np.complex128)
    work_arr = np.empty(g, dtype=np.complex128)
    scale_arr = np.empty(g)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex[:, ::1] gram = gram_arr
    cdef double complex[::1] work = work_arr
    cdef double[::1] d = scale_arr
    cdef Py_ssize_t i, j, p, t
    cdef double complex acc
    cdef double mag
    cdef int ok = 1
    with nogil:
        if m <= n:
            for i in range(m):
                mag = 0.0
                for p in range(n):
                    mag += (stacked[i, p].real * stacked[i, p].real
                            + stacked[i, p].imag * stacked[i, p].imag)
                if mag <= 0.0:
                    ok = 0
                    break
                d[i] = 1.0 / sqrt(mag)
            if ok:
                for i in range(m):
                    for j in range(i + 1):
                        acc = 0.0
                        for p in range(n):
                            acc = (acc + stacked[i, p]
                                   * stacked[j, p].conjugate())
                        gram[i, j] = acc * (d[i] * d[j])
                ok = _cholesky_complex(gram)
            if ok:
                for t in range(k):
                    for i in range(m):
                        work[i] = 1.0 if i == positions[t] else 0.0
                    _chol_solve_complex(gram, work)
                    for i in range(n):
                        acc = 0.0
                        for j in range(m):
                            acc = (acc + stacked[j, i].conjugate()
                                   * (d[j] * work[j]))
                        out[i, t] = acc * d[positions[t]]
        else:
            for i in range(n):
                mag = 0.0
                for p in range(m):
                    mag += (stacked[p, i].real * stacked[p, i].real
                            + stacked[p, i].imag * stacked[p, i].imag)
                if mag <= 0.0:
                    ok = 0
                    break
                d[i] = 1.0 / sqrt(mag)
            if ok:
                for i in range(n):
                    for j in range(i + 1):
                        acc = 0.0
                        for p in range(m):
                            acc = (acc + stacked[p, i].conjugate()
                                   * stacked[p, j])
                        gram[i, j] = acc * (d[i] * d[j])
                ok = _cholesky_complex(gram)
            if ok:
                for t in range(k):
                    for i in range(n):
                        work[i] = stacked[positions[t], i].conjugate() * d[i]
                    _chol_solve_complex(gram, work)
                    for i in range(n):
                        out[i, t] = work[i] * d[i]
    return out_arr, ok != 0
