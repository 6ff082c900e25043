"""Eigendecomposition, window counting, local weights and Green functions.

Window conventions are half-open [lo, hi) everywhere, so disjoint windows
partition counts exactly.  Full decompositions are dense LAPACK solves up
to DENSE_EIG_LIMIT sites; pure counting goes through the inertia kernels
(no eigenvectors), which is also how boxes beyond the dense limit are
handled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import ConfigurationError, DomainError, NumericalError, ResourceError
from .lattice import FiniteHamiltonian

DENSE_EIG_LIMIT = 4000

# widening factor used to translate LAPACK's (vl, vu] into our [lo, hi)
_EDGE = 1e-12


@dataclass
class SpectralData:
    """Ascending eigenvalues and unit eigenvectors (column j <-> E_j)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def site_weights(self, site_index: int) -> np.ndarray:
        """|psi_j(n)|^2 for all j at one site."""
        if not 0 <= site_index < self.eigenvectors.shape[0]:
            raise DomainError(f"site index {site_index} outside box")
        return self.eigenvectors[site_index, :] ** 2


def eigensolve(H: FiniteHamiltonian,
               dense_limit: int = DENSE_EIG_LIMIT) -> SpectralData:
    """Full symmetric eigendecomposition of the box Hamiltonian."""
    if H.n_sites > dense_limit:
        raise ResourceError(f"{H.n_sites} sites exceeds the dense "
                            f"eigensolve limit {dense_limit}; use "
                            "window_count for counting at this size")
    try:
        if H.geometry.dim == 1:
            diag, off = H.tridiagonal()
            w, v = sla.eigh_tridiagonal(diag, off)
        else:
            w, v = sla.eigh(H.dense())
    except (sla.LinAlgError, np.linalg.LinAlgError) as exc:
        raise NumericalError(f"eigensolve failed for box "
                             f"{H.geometry.lows}..{H.geometry.highs}, "
                             f"seed {H.seed}: {exc}") from exc
    return SpectralData(w, v)


def count_in_window(data: SpectralData, window: tuple[float, float]) -> int:
    """#{j : E_j in [lo, hi)} from an eigendecomposition."""
    lo, hi = window
    if not lo < hi:
        raise ConfigurationError(f"window must satisfy lo < hi, got {window}")
    ev = data.eigenvalues
    return int(np.searchsorted(ev, hi, side="left")
               - np.searchsorted(ev, lo, side="left"))


def local_weight(data: SpectralData, window: tuple[float, float],
                 site_indices) -> float:
    """Spectral weight sum_{j: E_j in window} sum_{n in sites} |psi_j(n)|^2."""
    lo, hi = window
    if not lo < hi:
        raise ConfigurationError(f"window must satisfy lo < hi, got {window}")
    sites = np.asarray(site_indices, dtype=np.int64)
    if sites.size == 0:
        return 0.0
    nbox = data.eigenvectors.shape[0]
    if sites.min() < 0 or sites.max() >= nbox:
        raise DomainError("site index outside box")
    ev = data.eigenvalues
    j0 = int(np.searchsorted(ev, lo, side="left"))
    j1 = int(np.searchsorted(ev, hi, side="left"))
    if j1 == j0:
        return 0.0
    block = data.eigenvectors[np.ix_(sites, range(j0, j1))]
    return float(np.sum(block * block))


def window_count(H: FiniteHamiltonian, window: tuple[float, float],
                 dense_limit: int = DENSE_EIG_LIMIT) -> int:
    """Eigenvalue count in [lo, hi) without eigenvectors.

    1D boxes always use the Sturm kernel; higher dimensions use a dense
    solve below dense_limit sites and banded LDL^T inertia above.
    """
    lo, hi = window
    if not lo < hi:
        raise ConfigurationError(f"window must satisfy lo < hi, got {window}")
    if H.geometry.dim == 1:
        diag, off = H.tridiagonal()
        return kernels.count_window(diag, off, lo, hi)
    if H.n_sites <= dense_limit:
        ev = np.sort(sla.eigvalsh(H.dense()))
        return int(np.searchsorted(ev, hi, side="left")
                   - np.searchsorted(ev, lo, side="left"))
    return kernels.banded_count_window(H.banded_lower(), lo, hi)


def windowed_eigenpairs(H: FiniteHamiltonian, window: tuple[float, float],
                        dense_limit: int = DENSE_EIG_LIMIT):
    """Eigenpairs with E_j in [lo, hi) only.

    LAPACK's range selection is (vl, vu]; the range is widened by a hair
    and masked back to the exact half-open convention.
    """
    lo, hi = window
    if not lo < hi:
        raise ConfigurationError(f"window must satisfy lo < hi, got {window}")
    pad = _EDGE * max(1.0, abs(lo), abs(hi))
    if H.geometry.dim == 1:
        diag, off = H.tridiagonal()
        w, v = sla.eigh_tridiagonal(diag, off, select="v",
                                    select_range=(lo - pad, hi + pad))
    else:
        if H.n_sites > dense_limit:
            raise ResourceError(f"{H.n_sites} sites exceeds dense limit "
                                f"{dense_limit} for windowed eigenpairs")
        w, v = sla.eigh(H.dense(), subset_by_value=(lo - pad, hi + pad))
    keep = (w >= lo) & (w < hi)
    return w[keep], v[:, keep]


@dataclass(frozen=True)
class GreenQuery:
    """Resolvent entries requested at site-index pairs, Im z > 0."""

    z: complex
    sites: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.z.imag > 0.0:
            raise DomainError(f"Green query needs Im z > 0, got z = {self.z}")


def green(H: FiniteHamiltonian, query: GreenQuery) -> dict:
    """Resolvent entries (n, m) -> <delta_n, (H - z)^(-1) delta_m>.

    One linear solve per distinct column m; 1D boxes use the banded solver.
    """
    cols = sorted({m for _, m in query.sites})
    n = H.n_sites
    if any(not 0 <= m < n for m in cols) or \
       any(not 0 <= i < n for i, _ in query.sites):
        raise DomainError("green query site outside box")
    z = complex(query.z)
    sol = {}
    if H.geometry.dim == 1:
        diag, off = H.tridiagonal()
        ab = np.zeros((3, n), dtype=np.complex128)
        ab[0, 1:] = off
        ab[1, :] = diag - z
        ab[2, :-1] = off
        rhs = np.zeros((n, len(cols)), dtype=np.complex128)
        for k, m in enumerate(cols):
            rhs[m, k] = 1.0
        x = sla.solve_banded((1, 1), ab, rhs)
    else:
        a = H.dense().astype(np.complex128)
        a[np.diag_indices_from(a)] -= z
        rhs = np.zeros((n, len(cols)), dtype=np.complex128)
        for k, m in enumerate(cols):
            rhs[m, k] = 1.0
        x = np.linalg.solve(a, rhs)
    col_of = {m: k for k, m in enumerate(cols)}
    for i, m in query.sites:
        sol[(i, m)] = complex(x[i, col_of[m]])
    return sol


def green_column(H: FiniteHamiltonian, z: complex, column: int) -> np.ndarray:
    """Full resolvent column G(z; ., column); H symmetric so also row."""
    if not complex(z).imag > 0.0:
        raise DomainError(f"Im z must be > 0, got {z}")
    n = H.n_sites
    if not 0 <= column < n:
        raise DomainError("column outside box")
    e = np.zeros(n, dtype=np.complex128)
    e[column] = 1.0
    if H.geometry.dim == 1:
        diag, off = H.tridiagonal()
        ab = np.zeros((3, n), dtype=np.complex128)
        ab[0, 1:] = off
        ab[1, :] = diag - z
        ab[2, :-1] = off
        return sla.solve_banded((1, 1), ab, e)
    a = H.dense().astype(np.complex128)
    a[np.diag_indices_from(a)] -= z
    return np.linalg.solve(a, e)
