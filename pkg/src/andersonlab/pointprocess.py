"""Rescaled eigenvalue/eigenfunction window functionals.

Four nonnegative functionals of one disorder realization, all evaluated
on a window (energy +- halfwidth / beta) x (scale * region) with
beta = L**(d/alpha):

* host_weighted:    spectral weight of the host-box operator over the
                    region's sites (the host box stands in for the full
                    lattice, padded beyond the scaled region).
* cell_weighted:    the same functional for one sub-box restriction.
* cell_anchored:    plain eigenvalue count of a sub-box, attributed to
                    the cell's anchor point; zero when the anchor falls
                    outside the region.
* anchored_total:   sum of cell_anchored over the partition (integer).

Host and cells share one realization's potential exactly (draws are keyed
by absolute site coordinates), which is what makes the host-vs-cells gap
meaningful.  Also here: the exact resolvent decoupling identity check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import disorder, kernels, lattice, spectral
from .errors import ConfigurationError, DomainError
from .lattice import (BoxGeometry, BoxPartition, FiniteHamiltonian, Rectangle,
                      boundary_distance, energy_scale)

KIND_HOST_WEIGHTED = "host_weighted"
KIND_CELL_WEIGHTED = "cell_weighted"
KIND_CELL_ANCHORED = "cell_anchored"
KIND_ANCHORED_TOTAL = "anchored_total"


@dataclass(frozen=True)
class WindowSpec:
    """A rescaled counting window: energy, halfwidth, region, scale."""

    energy: float
    halfwidth: float
    region: Rectangle
    scale: int
    alpha: float

    def __post_init__(self):
        if self.halfwidth <= 0.0:
            raise ConfigurationError("interval halfwidth must be positive")
        if self.scale < 2:
            raise ConfigurationError(f"scale must be >= 2, got {self.scale}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must be in (0,1], got {self.alpha}")

    @property
    def dim(self) -> int:
        return self.region.dim

    @property
    def beta(self) -> float:
        return energy_scale(self.scale, self.dim, self.alpha)

    def energy_window(self) -> tuple[float, float]:
        w = self.halfwidth / self.beta
        return (self.energy - w, self.energy + w)

    def region_box(self) -> BoxGeometry:
        return self.region.lattice_box(self.scale)

    def to_json(self) -> dict:
        return {"energy": self.energy, "halfwidth": self.halfwidth,
                "region": self.region.to_json(), "scale": self.scale,
                "alpha": self.alpha, "beta": self.beta}


@dataclass
class CountSample:
    """One realization's value of a window functional."""

    kind: str
    value: float
    realization_index: int
    window: WindowSpec
    cell: tuple[int, ...] | None = None

    def to_record(self) -> dict:
        rec = {"kind": self.kind, "realization": self.realization_index,
               "L": self.window.scale, "energy": self.window.energy,
               "halfwidth": self.window.halfwidth,
               "q_lows": list(self.window.region.lows),
               "q_highs": list(self.window.region.highs),
               "value": self.value}
        if self.cell is not None:
            rec["cell"] = list(self.cell)
        return rec


def host_geometry(w: WindowSpec, padding_sites: int) -> BoxGeometry:
    """The finite stand-in for the full lattice: scaled region + padding."""
    if padding_sites < 1:
        raise ConfigurationError("padding must be at least one site")
    inner = w.region_box()
    return BoxGeometry(tuple(l - padding_sites for l in inner.lows),
                       tuple(h + padding_sites for h in inner.highs))


def region_site_indices(geom: BoxGeometry, w: WindowSpec) -> np.ndarray:
    """Indices within geom of the sites lying in scale * region.

    Every site of the scaled region must be present in the host box
    (equality allowed: a region covering the whole box reproduces plain
    counts by completeness).
    """
    inner = w.region_box()
    if not geom.contains_box(inner):
        raise DomainError("scaled region must lie inside the host box")
    return geom.index_of(inner.coords())


def host_weighted_count(H: FiniteHamiltonian, w: WindowSpec,
                        realization_index: int = 0) -> CountSample:
    """Spectral weight of the host operator in the window over the region."""
    sites = region_site_indices(H.geometry, w)
    lo, hi = w.energy_window()
    vals, vecs = spectral.windowed_eigenpairs(H, (lo, hi))
    if len(vals) == 0:
        value = 0.0
    else:
        block = vecs[sites, :]
        value = float(np.sum(block * block))
    return CountSample(KIND_HOST_WEIGHTED, value, realization_index, w)


def cell_weighted_count(cell: BoxGeometry, spec: disorder.DisorderSpec,
                        seed: disorder.SeedPath, w: WindowSpec) -> CountSample:
    """Same functional for the operator restricted to one cell."""
    H = lattice.build_hamiltonian(cell, spec, seed)
    inner = w.region_box()
    mask = inner.contains(cell.coords())
    idx = np.nonzero(mask)[0]
    if len(idx) == 0:
        return CountSample(KIND_CELL_WEIGHTED, 0.0, seed.realization_index, w)
    sd = spectral.eigensolve(H)
    value = spectral.local_weight(sd, w.energy_window(), idx)
    return CountSample(KIND_CELL_WEIGHTED, value, seed.realization_index, w)


def _anchor_in_region(p: tuple[int, ...], sub_scale: int, w: WindowSpec) -> bool:
    anchor = [q * sub_scale / w.scale for q in p]
    return bool(w.region.contains_points(np.array([anchor]))[0])


def cell_anchored_count(cell: BoxGeometry, p: tuple[int, ...], sub_scale: int,
                        spec: disorder.DisorderSpec, seed: disorder.SeedPath,
                        w: WindowSpec) -> CountSample:
    """Eigenvalue count of the cell if its anchor p*l/L lies in the region."""
    if not _anchor_in_region(p, sub_scale, w):
        return CountSample(KIND_CELL_ANCHORED, 0.0, seed.realization_index, w,
                           cell=p)
    H = lattice.build_hamiltonian(cell, spec, seed)
    value = float(spectral.window_count(H, w.energy_window()))
    return CountSample(KIND_CELL_ANCHORED, value, seed.realization_index, w,
                       cell=p)


def anchored_cell_counts(partition: BoxPartition,
                         spec: disorder.DisorderSpec,
                         seed: disorder.SeedPath, w: WindowSpec) -> np.ndarray:
    """Vector of anchored counts over all partition cells, one realization."""
    lo, hi = w.energy_window()
    anchors_ok = np.array([_anchor_in_region(p, partition.sub_scale, w)
                           for p in partition.gamma_set])
    out = np.zeros(partition.n_cells, dtype=np.int64)
    if partition.dim == 1:
        keys = _cell_site_keys(partition)
        u = disorder.uniform01(seed.master_seed, seed.realization_index,
                               keys.ravel()).reshape(keys.shape)
        diags = spec.coupling * spec.inverse_cdf(u)
        offs = np.ones((partition.n_cells, partition.sub_scale - 1))
        counts = kernels.count_window_batch(diags, offs, lo, hi)
        out[anchors_ok] = counts[anchors_ok]
        return out
    for i, p in enumerate(partition.gamma_set):
        if anchors_ok[i]:
            H = lattice.build_hamiltonian(partition.cell(i), spec, seed)
            out[i] = spectral.window_count(H, (lo, hi))
    return out


def _cell_site_keys(partition: BoxPartition) -> np.ndarray:
    """Site keys per 1D cell, shape (n_cells, l); cacheable and tiny."""
    l = partition.sub_scale
    starts = np.array([p[0] * l for p in partition.gamma_set], dtype=np.int64)
    return (starts[:, None] + np.arange(l, dtype=np.int64)[None, :]) \
        .astype(np.uint64)


def anchored_total_count(partition: BoxPartition, spec: disorder.DisorderSpec,
                         seed: disorder.SeedPath, w: WindowSpec,
                         return_cells: bool = False):
    """Integer total of anchored counts over the partition."""
    per_cell = anchored_cell_counts(partition, spec, seed, w)
    total = CountSample(KIND_ANCHORED_TOTAL, float(per_cell.sum()),
                        seed.realization_index, w)
    if return_cells:
        return total, per_cell
    return total


def perturbation_identity_check(H_host: FiniteHamiltonian,
                                H_cell: FiniteHamiltonian, z: complex,
                                site, margin: int = 1) -> float:
    """Residual of the exact resolvent decoupling identity at one site.

    With G the host resolvent and G_c the cell resolvent, for a site n
    inside the cell (margin layers away from its boundary):

        G_c(n, n) - G(n, n) = sum_{(m, k)} G(n, k) G_c(m, n)

    summed over boundary pairs m in the cell, k outside with |m - k| = 1.
    Pairs leaving the host box are dropped: the host plays the full
    operator, so those hoppings do not exist.  Returns |LHS - RHS|.
    """
    if not complex(z).imag > 0.0:
        raise DomainError(f"Im z must be positive, got {z}")
    host, cell = H_host.geometry, H_cell.geometry
    if not host.contains_box(cell):
        raise DomainError("cell must lie inside the host box")
    cell_idx_in_host = host.index_of(cell.coords())
    if not np.array_equal(H_host.potential[cell_idx_in_host],
                          H_cell.potential):
        raise ConfigurationError("cell Hamiltonian is not the restriction "
                                 "of the host (potentials differ)")
    site = np.asarray(site, dtype=np.int64).reshape(1, -1)
    if not cell.contains(site).all():
        raise DomainError("site must lie in the cell")
    if int(boundary_distance(cell, site)[0]) <= margin:
        raise DomainError(f"site {tuple(site[0])} is not interior at "
                          f"margin {margin}")
    n_host = int(host.index_of(site)[0])
    n_cell = int(cell.index_of(site)[0])
    g_host_col = spectral.green_column(H_host, z, n_host)
    g_cell_col = spectral.green_column(H_cell, z, n_cell)
    _, pairs = lattice.boundary_layers(cell, margin=1)
    rhs = 0.0 + 0.0j
    for m, k in pairs:
        if not host.contains(np.array([k])).all():
            continue
        k_idx = int(host.index_of(np.array([k]))[0])
        m_idx = int(cell.index_of(np.array([m]))[0])
        rhs += g_host_col[k_idx] * g_cell_col[m_idx]
    lhs = g_cell_col[n_cell] - g_host_col[n_host]
    return float(abs(lhs - rhs))


@dataclass
class GapEstimate:
    """Monte Carlo estimate of E|host_weighted - anchored_total|."""

    scale: int
    mean: float
    stderr: float
    n_realizations: int
    gaps: np.ndarray = field(repr=False)

    def to_json(self) -> dict:
        return {"L": self.scale, "mean": self.mean, "stderr": self.stderr,
                "n_realizations": self.n_realizations}


def host_cells_gap(spec: disorder.DisorderSpec, w: WindowSpec,
                   partition: BoxPartition, n_realizations: int,
                   seed: disorder.SeedPath,
                   padding_sites: int | None = None) -> GapEstimate:
    """Mean absolute gap between the host and summed-cell functionals."""
    if n_realizations < 1:
        raise ConfigurationError("need at least one realization")
    if partition.parent_scale != w.scale:
        raise ConfigurationError("partition and window scales disagree")
    if padding_sites is None:
        padding_sites = 2 * partition.sub_scale
    geom = host_geometry(w, padding_sites)
    gaps = np.empty(n_realizations)
    for r in range(n_realizations):
        sd = seed.shifted(dr=r)
        H = lattice.build_hamiltonian(geom, spec, sd)
        xi = host_weighted_count(H, w, sd.realization_index).value
        eta = anchored_total_count(partition, spec, sd, w).value
        gaps[r] = abs(xi - eta)
    se = (gaps.std(ddof=1) / math.sqrt(n_realizations)
          if n_realizations > 1 else 0.0)
    return GapEstimate(scale=w.scale, mean=float(gaps.mean()),
                       stderr=float(se), n_realizations=n_realizations,
                       gaps=gaps)


def padding_convergence(spec: disorder.DisorderSpec, w: WindowSpec,
                        padding_sites: int, n_realizations: int,
                        seed: disorder.SeedPath) -> dict:
    """Doubling the host padding should barely move the host functional."""
    if n_realizations < 1:
        raise ConfigurationError("need at least one realization")
    means = {}
    for pad in (padding_sites, 2 * padding_sites):
        vals = np.empty(n_realizations)
        geom = host_geometry(w, pad)
        for r in range(n_realizations):
            sd = seed.shifted(dr=r)
            H = lattice.build_hamiltonian(geom, spec, sd)
            vals[r] = host_weighted_count(H, w, r).value
        means[pad] = (float(vals.mean()),
                      float(vals.std(ddof=1) / math.sqrt(n_realizations))
                      if n_realizations > 1 else 0.0)
    (m1, s1), (m2, s2) = means[padding_sites], means[2 * padding_sites]
    return {"padding": padding_sites, "mean": m1, "stderr": s1,
            "padding_doubled": 2 * padding_sites, "mean_doubled": m2,
            "stderr_doubled": s2, "shift": abs(m1 - m2),
            "shift_noise": math.hypot(s1, s2)}
