"""Pure-Python fallback for the inertia counting kernels.

Same algorithms and pivot handling as the compiled module, written with
plain Python loops.  Correct but slow; see benchmarks/bench_kernels.py.
"""


def tridiag_count_below(diag, off, x, pivmin):
    n = len(diag)
    if n == 0:
        return 0
    neg = 0
    d = diag[0] - x
    if -pivmin < d < pivmin:
        d = -pivmin
    if d < 0.0:
        neg += 1
    for i in range(1, n):
        d = (diag[i] - x) - off[i - 1] * off[i - 1] / d
        if -pivmin < d < pivmin:
            d = -pivmin
        if d < 0.0:
            neg += 1
    return neg


def tridiag_count_below_grid(diag, off, xs, out, pivmin):
    a = list(diag)
    b = list(off)
    for j, x in enumerate(xs):
        out[j] = tridiag_count_below(a, b, x, pivmin)


def tridiag_count_window_batch(diags, offs, lo, hi, out, pivmin):
    for i in range(diags.shape[0]):
        a = list(diags[i])
        b = list(offs[i])
        out[i] = (tridiag_count_below(a, b, hi, pivmin)
                  - tridiag_count_below(a, b, lo, pivmin))


def banded_count_below(band, x, pivmin):
    bw = band.shape[0] - 1
    n = band.shape[1]
    if n == 0:
        return 0
    w = [list(band[k]) for k in range(bw + 1)]
    for j in range(n):
        w[0][j] -= x
    neg = 0
    for j in range(n):
        d = w[0][j]
        if -pivmin < d < pivmin:
            d = -pivmin
        if d < 0.0:
            neg += 1
        m = min(bw, n - 1 - j)
        for i in range(1, m + 1):
            lij = w[i][j] / d
            for k in range(i, m + 1):
                w[k - i][j + i] -= w[k][j] * lij
    return neg
