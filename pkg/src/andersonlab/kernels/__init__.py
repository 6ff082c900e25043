"""Eigenvalue window counting via Sylvester inertia.

Counting eigenvalues in a half-open window [lo, hi) costs two LDL^T passes
and no eigenvectors, which is what every Monte Carlo loop in this package
hits.  A compiled Cython core is used when available; set
ANDERSONLAB_PURE_PYTHON=1 to force the pure-Python fallback (the benchmark
and the backend-equivalence tests do this).
"""

import os

import numpy as np

from . import inertia_py

if os.environ.get("ANDERSONLAB_PURE_PYTHON"):
    _impl = inertia_py
    BACKEND = "python"
else:
    try:
        from . import _inertia_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = inertia_py
        BACKEND = "python"

_SAFMIN = float(np.finfo(np.float64).tiny)


def _pivmin(off) -> float:
    if len(off) == 0:
        return _SAFMIN
    m = float(np.max(np.abs(off)))
    return _SAFMIN * max(1.0, m * m)


def count_below(diag, off, x) -> int:
    """#{eigenvalues < x} of the symmetric tridiagonal (diag, off)."""
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    return int(_impl.tridiag_count_below(diag, off, float(x), _pivmin(off)))


def count_below_grid(diag, off, xs) -> np.ndarray:
    """Counts below each shift in xs (any order), as an int64 array."""
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    out = np.empty(len(xs), dtype=np.int64)
    _impl.tridiag_count_below_grid(diag, off, xs, out, _pivmin(off))
    return out


def count_window(diag, off, lo, hi) -> int:
    """#{eigenvalues in [lo, hi)}; exact half-open window semantics."""
    if not lo < hi:
        raise ValueError(f"empty window [{lo}, {hi})")
    return count_below(diag, off, hi) - count_below(diag, off, lo)


def count_window_batch(diags, offs, lo, hi) -> np.ndarray:
    """Window counts for a batch of equally sized tridiagonals.

    diags has shape (m, n), offs shape (m, n-1); returns int64 (m,).
    """
    diags = np.ascontiguousarray(diags, dtype=np.float64)
    offs = np.ascontiguousarray(offs, dtype=np.float64)
    if not lo < hi:
        raise ValueError(f"empty window [{lo}, {hi})")
    out = np.empty(diags.shape[0], dtype=np.int64)
    piv = _pivmin(offs.ravel()) if offs.size else _SAFMIN
    _impl.tridiag_count_window_batch(diags, offs, float(lo), float(hi), out,
                                     piv)
    return out


def banded_count_below(band, x) -> int:
    """#{eigenvalues < x} for symmetric lower band storage (bw+1, n)."""
    band = np.ascontiguousarray(band, dtype=np.float64)
    piv = _pivmin(band[1:].ravel()) if band.shape[0] > 1 else _SAFMIN
    return int(_impl.banded_count_below(band, float(x), piv))


def banded_count_window(band, lo, hi) -> int:
    if not lo < hi:
        raise ValueError(f"empty window [{lo}, {hi})")
    return banded_count_below(band, hi) - banded_count_below(band, lo)
