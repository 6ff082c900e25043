# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inertia kernels: Sturm/LDL^T eigenvalue counting.

For a real symmetric matrix A the number of eigenvalues below a shift x
equals the number of negative pivots in the LDL^T factorization of A - xI
(Sylvester's law of inertia).  For tridiagonal A this is the classic Sturm
sequence; for banded A it is a right-looking band elimination.  Zero pivots
are replaced by -pivmin, the same tie-break LAPACK's bisection uses, so the
count is exact for a matrix within pivmin of the input.
"""

from libc.stdlib cimport free, malloc


cdef inline long _sturm(const double* a, const double* b, long n,
                        double x, double pivmin) noexcept nogil:
    cdef long i, neg = 0
    cdef double d = a[0] - x
    if d > -pivmin and d < pivmin:
        d = -pivmin
    if d < 0.0:
        neg += 1
    for i in range(1, n):
        d = (a[i] - x) - b[i - 1] * b[i - 1] / d
        if d > -pivmin and d < pivmin:
            d = -pivmin
        if d < 0.0:
            neg += 1
    return neg


def tridiag_count_below(const double[::1] diag, const double[::1] off,
                        double x, double pivmin):
    """Number of eigenvalues < x of the symmetric tridiagonal (diag, off)."""
    cdef long n = diag.shape[0]
    if n == 0:
        return 0
    if n == 1:
        return 1 if diag[0] - x < 0.0 else 0
    return _sturm(&diag[0], &off[0], n, x, pivmin)


def tridiag_count_below_grid(const double[::1] diag, const double[::1] off,
                             const double[::1] xs, long[::1] out,
                             double pivmin):
    """Counts below each shift in xs; fills out (same length as xs)."""
    cdef long n = diag.shape[0]
    cdef long m = xs.shape[0]
    cdef long j
    if n == 0:
        for j in range(m):
            out[j] = 0
        return
    with nogil:
        for j in range(m):
            if n == 1:
                out[j] = 1 if diag[0] - xs[j] < 0.0 else 0
            else:
                out[j] = _sturm(&diag[0], &off[0], n, xs[j], pivmin)


def tridiag_count_window_batch(const double[:, ::1] diags,
                               const double[:, ::1] offs,
                               double lo, double hi, long[::1] out,
                               double pivmin):
    """Counts in [lo, hi) for a batch of equally sized tridiagonals."""
    cdef long nmat = diags.shape[0]
    cdef long n = diags.shape[1]
    cdef long i
    with nogil:
        for i in range(nmat):
            if n == 1:
                out[i] = (1 if diags[i, 0] - hi < 0.0 else 0) \
                       - (1 if diags[i, 0] - lo < 0.0 else 0)
            else:
                out[i] = _sturm(&diags[i, 0], &offs[i, 0], n, hi, pivmin) \
                       - _sturm(&diags[i, 0], &offs[i, 0], n, lo, pivmin)


def banded_count_below(const double[:, ::1] band, double x, double pivmin):
    """Number of eigenvalues < x of a symmetric banded matrix.

    `band` is lower band storage: band[k, j] = A[j + k, j] for
    k = 0..bw, shape (bw + 1, n).  Cost O(n * bw^2), O(n * bw) scratch.
    """
    cdef long bw = band.shape[0] - 1
    cdef long n = band.shape[1]
    cdef long i, j, k, m, neg = 0
    cdef double d, lij
    cdef double* w
    if n == 0:
        return 0
    w = <double*> malloc((bw + 1) * n * sizeof(double))
    if w == NULL:
        raise MemoryError("banded_count_below scratch allocation failed")
    try:
        with nogil:
            for k in range(bw + 1):
                for j in range(n):
                    w[k * n + j] = band[k, j]
            for j in range(n):
                w[j] -= x
            for j in range(n):
                d = w[j]
                if d > -pivmin and d < pivmin:
                    d = -pivmin
                if d < 0.0:
                    neg += 1
                m = bw if bw < n - 1 - j else n - 1 - j
                for i in range(1, m + 1):
                    lij = w[i * n + j] / d
                    for k in range(i, m + 1):
                        # A[j+k, j+i] sits at band row k-i of column j+i
                        w[(k - i) * n + (j + i)] -= w[k * n + j] * lij
    finally:
        free(w)
    return neg
