"""Compiled enumeration kernels.

Hot loops behind the exhaustive sign averages and balanced-subset scans:
Gray-code enumeration with an in-place signed matrix, Schatten p-powers
via LAPACK ``zheev`` on the small Gram matrix, compensated summation.
Mirrors the call signatures of ``_kernels_py``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

DEF MAX_ENUM_BITS = 26

# Gram matrices up to this size are diagonalized by the in-house cyclic
# Jacobi sweep below; larger ones go through LAPACK zheev.  Jacobi wins on
# tiny matrices because it has no call/workspace overhead.
DEF JACOBI_MAX_D = 6


cdef inline double _cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef void _jacobi_eigs(double complex *h, int d, double *w) nogil:
    """Eigenvalues of a Hermitian d x d matrix by cyclic complex Jacobi.

    Destroys ``h``; writes the (unsorted) eigenvalues to ``w``.  Converges
    quadratically; a handful of sweeps reaches machine precision.
    """
    cdef int sweep, p, q, k
    cdef double scale2, off2, ag, app, aqq, tau, t, c, s
    cdef double complex g, u, hkp, hkq, us
    if d == 1:
        w[0] = h[0].real
        return
    scale2 = 0.0
    for p in range(d):
        for q in range(d):
            scale2 += _cabs2(h[p * d + q])
    if scale2 == 0.0:
        for p in range(d):
            w[p] = 0.0
        return
    for sweep in range(30):
        off2 = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                off2 += _cabs2(h[p * d + q])
        if off2 <= 1e-30 * scale2:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                g = h[p * d + q]
                ag = sqrt(_cabs2(g))
                if ag * ag <= 1e-36 * scale2:
                    h[p * d + q] = 0
                    h[q * d + p] = 0
                    continue
                app = h[p * d + p].real
                aqq = h[q * d + q].real
                tau = (aqq - app) / (2.0 * ag)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                u = g.conjugate() / ag
                us = u * s
                for k in range(d):
                    if k == p or k == q:
                        continue
                    hkp = h[k * d + p]
                    hkq = h[k * d + q]
                    h[k * d + p] = c * hkp - us * hkq
                    h[k * d + q] = s * hkp + u * c * hkq
                    h[p * d + k] = h[k * d + p].conjugate()
                    h[q * d + k] = h[k * d + q].conjugate()
                h[p * d + p] = app - t * ag
                h[q * d + q] = aqq + t * ag
                h[p * d + q] = 0
                h[q * d + p] = 0
    for p in range(d):
        w[p] = h[p * d + p].real


cdef struct EigWork:
    double complex *h      # Gram matrix buffer, d*d
    double complex *work
    double complex *pw     # scratch for trace powers, 2*d*d
    double *rwork
    double *w
    int d
    int lwork


cdef int _eigwork_alloc(EigWork *ew, int d) except -1:
    cdef double complex wkopt
    cdef double complex hdummy
    cdef double wdummy, rdummy
    cdef int info = 0, lwork = -1, lda = d, n = d
    cdef char jobz = b'N', uplo = b'L'
    zheev(&jobz, &uplo, &n, &hdummy, &lda, &wdummy, &wkopt, &lwork, &rdummy, &info)
    if info != 0:
        raise RuntimeError(f"zheev workspace query failed (info={info})")
    ew.d = d
    ew.lwork = <int>wkopt.real
    if ew.lwork < 2 * d:
        ew.lwork = 2 * d
    ew.h = <double complex *>malloc(d * d * sizeof(double complex))
    ew.work = <double complex *>malloc(ew.lwork * sizeof(double complex))
    ew.pw = <double complex *>malloc(2 * d * d * sizeof(double complex))
    ew.rwork = <double *>malloc((3 * d > 1 and 3 * d or 1) * sizeof(double))
    ew.w = <double *>malloc(d * sizeof(double))
    if ew.h == NULL or ew.work == NULL or ew.pw == NULL or ew.rwork == NULL or ew.w == NULL:
        _eigwork_free(ew)
        raise MemoryError()
    return 0


cdef void _eigwork_free(EigWork *ew) noexcept:
    free(ew.h); free(ew.work); free(ew.pw); free(ew.rwork); free(ew.w)
    ew.h = NULL; ew.work = NULL; ew.pw = NULL; ew.rwork = NULL; ew.w = NULL


cdef double _gram_trace_power(EigWork *ew, int d, int s) nogil:
    """trace(G^s) for the Hermitian Gram matrix in ``ew.h``, small integer s.

    No eigensolver: s = 1 is the trace, s = 2 the squared Frobenius norm,
    larger s costs s - 2 small matrix products in the ``pw`` scratch.
    """
    cdef int i, j, l, t
    cdef double total
    cdef double complex acc
    cdef double complex *cur
    cdef double complex *nxt
    cdef double complex *tmp
    if s == 1:
        total = 0.0
        for i in range(d):
            total += ew.h[i * d + i].real
        return total
    if s == 2:
        total = 0.0
        for i in range(d * d):
            total += _cabs2(ew.h[i])
        return total
    cur = ew.pw
    nxt = ew.pw + d * d
    for i in range(d * d):
        cur[i] = ew.h[i]
    for t in range(s - 2):
        for i in range(d):
            for j in range(d):
                acc = 0
                for l in range(d):
                    acc = acc + cur[i * d + l] * ew.h[l * d + j]
                nxt[i * d + j] = acc
        tmp = cur; cur = nxt; nxt = tmp
    # trace(P G) with P Hermitian-power of G: sum P_ij * conj(G_ij)
    total = 0.0
    for i in range(d * d):
        total += cur[i].real * ew.h[i].real + cur[i].imag * ew.h[i].imag
    return total


cdef double _gram_ppower(const double complex *m, int rows, int cols,
                         double p_half, EigWork *ew, int *info) nogil:
    """p-power of a rows x cols row-major matrix via its smaller Gram matrix.

    The row-major Hermitian Gram buffer read column-major by LAPACK is its
    conjugate, which has the same (real) spectrum, so no transpose is needed.
    """
    cdef int d, i, j, l, n, lda, s
    cdef double complex acc
    cdef double ppsum, lam
    cdef char jobz = b'N', uplo = b'L'
    if rows <= cols:
        d = rows
        for i in range(d):
            for j in range(d):
                acc = 0
                for l in range(cols):
                    acc = acc + m[i * cols + l] * m[j * cols + l].conjugate()
                ew.h[i * d + j] = acc
    else:
        d = cols
        for i in range(d):
            for j in range(d):
                acc = 0
                for l in range(rows):
                    acc = acc + m[l * cols + i].conjugate() * m[l * cols + j]
                ew.h[i * d + j] = acc
    info[0] = 0
    s = <int>(p_half + 0.5)
    if 1 <= s <= 8 and fabs(p_half - s) < 1e-12:
        # even p: trace power of the Gram matrix, no eigensolver needed
        return _gram_trace_power(ew, d, s)
    if d <= JACOBI_MAX_D:
        _jacobi_eigs(ew.h, d, ew.w)
    else:
        n = d
        lda = d
        zheev(&jobz, &uplo, &n, ew.h, &lda, ew.w, ew.work, &ew.lwork, ew.rwork, info)
        if info[0] != 0:
            return -1.0
    ppsum = 0.0
    for i in range(d):
        lam = ew.w[i]
        if lam > 0.0:
            ppsum += pow(lam, p_half)
    return ppsum


def schatten_ppower_batch(mats, double p):
    """``||M_i||_p^p`` for every matrix ``M_i`` in a ``(N, m, n)`` stack."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=3, mode="c"] stack = \
        np.ascontiguousarray(mats, dtype=np.complex128)
    cdef Py_ssize_t count = stack.shape[0], k
    cdef int rows = <int>stack.shape[1], cols = <int>stack.shape[2]
    cdef int info = 0
    cdef double p_half = p / 2.0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(count)
    cdef EigWork ew
    _eigwork_alloc(&ew, min(rows, cols))
    try:
        with nogil:
            for k in range(count):
                out[k] = _gram_ppower(&stack[k, 0, 0], rows, cols, p_half, &ew, &info)
                if info != 0:
                    break
        if info != 0:
            raise np.linalg.LinAlgError(f"zheev failed to converge (info={info})")
    finally:
        _eigwork_free(&ew)
    return out


def sign_enum_ppower_sum(a, double p):
    """Sum of ``||R o A||_p^p`` over all sign matrices R of A's shape.

    Gray-code order: one entry of the running signed copy flips per step,
    covering exactly the patterns of the little-endian index convention.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] am = \
        np.ascontiguousarray(a, dtype=np.complex128)
    cdef int rows = <int>am.shape[0], cols = <int>am.shape[1]
    cdef int bits = rows * cols
    if bits > MAX_ENUM_BITS:
        raise ValueError(f"exhaustive enumeration over 2^{bits} items refused (cap 2^{MAX_ENUM_BITS})")
    cdef unsigned long long total = 1ULL << bits, i
    cdef int t, info = 0
    cdef double p_half = p / 2.0
    cdef double s = 0.0, comp = 0.0, val, y, tt
    cdef double complex *buf = <double complex *>malloc(bits * sizeof(double complex))
    if buf == NULL:
        raise MemoryError()
    cdef EigWork ew
    _eigwork_alloc(&ew, min(rows, cols))
    try:
        with nogil:
            for t in range(bits):
                buf[t] = (&am[0, 0])[t]
            i = 0
            while True:
                val = _gram_ppower(buf, rows, cols, p_half, &ew, &info)
                if info != 0:
                    break
                # Kahan step
                y = val - comp
                tt = s + y
                comp = (tt - s) - y
                s = tt
                i += 1
                if i == total:
                    break
                t = __builtin_ctzll(i)
                buf[t] = -buf[t]
        if info != 0:
            raise np.linalg.LinAlgError(f"zheev failed to converge (info={info})")
    finally:
        free(buf)
        _eigwork_free(&ew)
    return s


def sign_vector_enum_ppower_sum(ts, double p):
    """Sum of ``||sum_i e_i T_i||_p^p`` over all sign vectors e in {+-1}^k."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=3, mode="c"] stack = \
        np.ascontiguousarray(ts, dtype=np.complex128)
    cdef int k = <int>stack.shape[0]
    cdef int rows = <int>stack.shape[1], cols = <int>stack.shape[2]
    cdef int sz = rows * cols
    if k > MAX_ENUM_BITS:
        raise ValueError(f"exhaustive enumeration over 2^{k} items refused (cap 2^{MAX_ENUM_BITS})")
    cdef unsigned long long total = 1ULL << k, i
    cdef int t, l, info = 0
    cdef double p_half = p / 2.0
    cdef double s = 0.0, comp = 0.0, val, y, tt
    cdef double complex *msum = <double complex *>malloc(sz * sizeof(double complex))
    cdef signed char *eps = <signed char *>malloc(k * sizeof(signed char))
    if msum == NULL or eps == NULL:
        free(msum); free(eps)
        raise MemoryError()
    cdef EigWork ew
    _eigwork_alloc(&ew, min(rows, cols))
    try:
        with nogil:
            for l in range(sz):
                msum[l] = 0
            for t in range(k):
                eps[t] = 1
                for l in range(sz):
                    msum[l] = msum[l] + (&stack[t, 0, 0])[l]
            i = 0
            while True:
                val = _gram_ppower(msum, rows, cols, p_half, &ew, &info)
                if info != 0:
                    break
                y = val - comp
                tt = s + y
                comp = (tt - s) - y
                s = tt
                i += 1
                if i == total:
                    break
                t = __builtin_ctzll(i)
                for l in range(sz):
                    msum[l] = msum[l] - 2.0 * eps[t] * (&stack[t, 0, 0])[l]
                eps[t] = -eps[t]
        if info != 0:
            raise np.linalg.LinAlgError(f"zheev failed to converge (info={info})")
    finally:
        free(msum)
        free(eps)
        _eigwork_free(&ew)
    return s


def balanced_subset_scan(a, double p):
    """Scan all balanced bipartitions of ``{0..2m-1}`` (half containing 0).

    Lexicographic enumeration of the size-``m`` subsets containing index 0;
    returns ``(best_sigma, best_ppower, mean_ppower, count)``.  See the
    fallback implementation for the contract.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2, mode="c"] am = \
        np.ascontiguousarray(a, dtype=np.complex128)
    cdef int dim = <int>am.shape[0]
    if am.shape[0] != am.shape[1] or dim % 2 != 0 or dim < 2:
        raise ValueError(f"need a square matrix of even dimension, got {am.shape[0]}x{am.shape[1]}")
    cdef int m = dim // 2
    cdef int i, j, t, info = 0
    cdef double p_half = p / 2.0
    cdef double s = 0.0, comp = 0.0, val, y, tt, best = -1.0
    cdef unsigned long long count = 0
    cdef int *idx = <int *>malloc(m * sizeof(int))
    cdef int *best_idx = <int *>malloc(m * sizeof(int))
    cdef signed char *side = <signed char *>malloc(dim * sizeof(signed char))
    cdef double complex *buf = <double complex *>malloc(dim * dim * sizeof(double complex))
    if idx == NULL or best_idx == NULL or side == NULL or buf == NULL:
        free(idx); free(best_idx); free(side); free(buf)
        raise MemoryError()
    cdef EigWork ew
    _eigwork_alloc(&ew, dim)
    try:
        with nogil:
            for t in range(m):
                idx[t] = t
            while True:
                for t in range(dim):
                    side[t] = 0
                for t in range(m):
                    side[idx[t]] = 1
                for i in range(dim):
                    for j in range(dim):
                        if side[i] != side[j]:
                            buf[i * dim + j] = am[i, j]
                        else:
                            buf[i * dim + j] = 0
                val = _gram_ppower(buf, dim, dim, p_half, &ew, &info)
                if info != 0:
                    break
                count += 1
                y = val - comp
                tt = s + y
                comp = (tt - s) - y
                s = tt
                if val > best:
                    best = val
                    for t in range(m):
                        best_idx[t] = idx[t]
                # next combination with idx[0] == 0 pinned
                t = m - 1
                while t >= 1 and idx[t] == dim - m + t:
                    t -= 1
                if t == 0:
                    break
                idx[t] += 1
                for j in range(t + 1, m):
                    idx[j] = idx[j - 1] + 1
        if info != 0:
            raise np.linalg.LinAlgError(f"zheev failed to converge (info={info})")
        sigma = np.empty(m, dtype=np.int64)
        for t in range(m):
            sigma[t] = best_idx[t]
        return sigma, best, s / count, int(count)
    finally:
        free(idx)
        free(best_idx)
        free(side)
        free(buf)
        _eigwork_free(&ew)
