"""Finite boxes of the integer lattice and the Anderson Hamiltonian on them.

A box is a product of half-open integer intervals with a row-major
site <-> index bijection.  The Hamiltonian on a box is the adjacency
matrix of the induced lattice graph (hopping 1 to nearest neighbours,
free truncation: edges leaving the box are simply dropped) plus the
random potential on the diagonal.

Also here: the sub-box partition machinery used at scale L (cells of
side l_L ~ L^a covering a scaled region), boundary layers with a
logarithmic interior margin, and the energy scaling L**(d/alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import disorder
from .errors import ConfigurationError, DomainError, ResourceError

MAX_SITES_DEFAULT = 100_000


@dataclass(frozen=True)
class BoxGeometry:
    """Axis-aligned box of lattice sites, half-open per axis."""

    lows: tuple[int, ...]
    highs: tuple[int, ...]

    def __post_init__(self):
        if len(self.lows) != len(self.highs) or not self.lows:
            raise ConfigurationError("lows/highs must be equal-length, nonempty")
        if any(h <= l for l, h in zip(self.lows, self.highs)):
            raise ConfigurationError(f"degenerate box {self.lows}..{self.highs}")

    @property
    def dim(self) -> int:
        return len(self.lows)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(h - l for l, h in zip(self.lows, self.highs))

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.shape))

    def strides(self) -> np.ndarray:
        shape = self.shape
        s = np.ones(self.dim, dtype=np.int64)
        for j in range(self.dim - 2, -1, -1):
            s[j] = s[j + 1] * shape[j + 1]
        return s

    def coords(self) -> np.ndarray:
        """All sites as an (n_sites, dim) int64 array, row-major order."""
        axes = [np.arange(l, h, dtype=np.int64)
                for l, h in zip(self.lows, self.highs)]
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=1)

    def index_of(self, coords) -> np.ndarray:
        """Row-major linear indices of sites; raises if any lie outside."""
        coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        if not self.contains(coords).all():
            raise DomainError("site outside box")
        rel = coords - np.asarray(self.lows, dtype=np.int64)
        return rel @ self.strides()

    def contains(self, coords) -> np.ndarray:
        coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        lo = np.asarray(self.lows)
        hi = np.asarray(self.highs)
        return np.all((coords >= lo) & (coords < hi), axis=1)

    def contains_box(self, other: "BoxGeometry") -> bool:
        return (other.dim == self.dim
                and all(o >= s for o, s in zip(other.lows, self.lows))
                and all(o <= s for o, s in zip(other.highs, self.highs)))

    def to_json(self) -> dict:
        return {"lows": list(self.lows), "highs": list(self.highs)}

    @classmethod
    def from_json(cls, obj: dict) -> "BoxGeometry":
        return cls(tuple(int(v) for v in obj["lows"]),
                   tuple(int(v) for v in obj["highs"]))


def interval(lo: int, hi: int) -> BoxGeometry:
    """1D box shorthand."""
    return BoxGeometry((lo,), (hi,))


def cube(side: int, dim: int = 1, low: int = 0) -> BoxGeometry:
    return BoxGeometry((low,) * dim, (low + side,) * dim)


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned region of R^d with positive volume, half-open."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def __post_init__(self):
        if len(self.lows) != len(self.highs) or not self.lows:
            raise ConfigurationError("rectangle lows/highs mismatch")
        if any(not (math.isfinite(l) and math.isfinite(h)) or h <= l
               for l, h in zip(self.lows, self.highs)):
            raise ConfigurationError(f"rectangle must be bounded with positive "
                                     f"volume: {self.lows}..{self.highs}")

    @property
    def dim(self) -> int:
        return len(self.lows)

    @property
    def volume(self) -> float:
        return float(np.prod([h - l for l, h in zip(self.lows, self.highs)]))

    def contains_points(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        lo = np.asarray(self.lows)
        hi = np.asarray(self.highs)
        return np.all((pts >= lo) & (pts < hi), axis=1)

    def lattice_box(self, scale: float) -> BoxGeometry:
        """Sites of (scale * self) as a box: ceil(s*lo) <= n < ceil(s*hi)."""
        lows = tuple(int(math.ceil(scale * l)) for l in self.lows)
        highs = tuple(int(math.ceil(scale * h)) for h in self.highs)
        return BoxGeometry(lows, highs)

    def to_json(self) -> dict:
        return {"lows": list(self.lows), "highs": list(self.highs)}

    @classmethod
    def from_json(cls, obj: dict) -> "Rectangle":
        return cls(tuple(float(v) for v in obj["lows"]),
                   tuple(float(v) for v in obj["highs"]))


def unit_box(dim: int) -> Rectangle:
    return Rectangle((0.0,) * dim, (1.0,) * dim)


def energy_scale(L: int, dim: int, alpha: float) -> float:
    """The window scaling L**(d/alpha), exact when d/alpha is integral."""
    k = dim / alpha
    if abs(k - round(k)) < 1e-12:
        return float(L ** int(round(k)))
    return float(L) ** k


@dataclass
class FiniteHamiltonian:
    """H = adjacency + diag(potential) on a box, with its seed provenance."""

    geometry: BoxGeometry
    potential: np.ndarray
    seed: disorder.SeedPath | None = None
    _dense: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.potential = np.asarray(self.potential, dtype=np.float64)
        if self.potential.shape != (self.geometry.n_sites,):
            raise ConfigurationError("potential length != number of sites")

    @property
    def n_sites(self) -> int:
        return self.geometry.n_sites

    @property
    def bandwidth(self) -> int:
        return int(self.geometry.strides()[0])

    def dense(self) -> np.ndarray:
        if self._dense is None:
            h = _dense_adjacency(self.geometry)
            h[np.diag_indices_from(h)] = self.potential
            self._dense = h
        return self._dense

    def tridiagonal(self) -> tuple[np.ndarray, np.ndarray]:
        if self.geometry.dim != 1:
            raise DomainError("tridiagonal form requires a 1D box")
        n = self.n_sites
        return self.potential, np.ones(n - 1, dtype=np.float64)

    def banded_lower(self) -> np.ndarray:
        """Lower band storage band[k, j] = H[j + k, j], shape (bw+1, n)."""
        geom = self.geometry
        n = geom.n_sites
        strides = geom.strides()
        band = np.zeros((self.bandwidth + 1, n), dtype=np.float64)
        band[0] = self.potential
        coords = geom.coords()
        for j in range(geom.dim):
            has_next = coords[:, j] + 1 < geom.highs[j]
            band[strides[j], np.nonzero(has_next)[0]] = 1.0
        return band


def _dense_adjacency(geom: BoxGeometry) -> np.ndarray:
    n = geom.n_sites
    h = np.zeros((n, n), dtype=np.float64)
    coords = geom.coords()
    strides = geom.strides()
    idx = np.arange(n)
    for j in range(geom.dim):
        sel = idx[coords[:, j] + 1 < geom.highs[j]]
        h[sel, sel + strides[j]] = 1.0
        h[sel + strides[j], sel] = 1.0
    return h


def build_hamiltonian(geom: BoxGeometry, spec: disorder.DisorderSpec,
                      seed: disorder.SeedPath,
                      max_sites: int = MAX_SITES_DEFAULT) -> FiniteHamiltonian:
    """Assemble H on the box with coordinate-keyed potential draws."""
    if geom.n_sites > max_sites:
        raise ResourceError(f"box has {geom.n_sites} sites "
                            f"(limit {max_sites})")
    pot = disorder.potential_at(spec, seed, geom.coords())
    return FiniteHamiltonian(geom, pot, seed)


@dataclass(frozen=True)
class BoxPartition:
    """Sub-boxes of side l covering the scaled region, with their indices."""

    parent_scale: int
    sub_scale: int
    exponent: float
    region: Rectangle
    gamma_set: tuple[tuple[int, ...], ...]
    interior_margin: int

    @property
    def n_cells(self) -> int:
        return len(self.gamma_set)

    @property
    def dim(self) -> int:
        return self.region.dim

    def cells(self) -> list[BoxGeometry]:
        l = self.sub_scale
        return [BoxGeometry(tuple(q * l for q in p),
                            tuple((q + 1) * l for q in p))
                for p in self.gamma_set]

    def cell(self, i: int) -> BoxGeometry:
        p = self.gamma_set[i]
        l = self.sub_scale
        return BoxGeometry(tuple(q * l for q in p),
                           tuple((q + 1) * l for q in p))

    def anchors(self) -> np.ndarray:
        """Per-cell anchor points p * l / L, shape (n_cells, d)."""
        p = np.asarray(self.gamma_set, dtype=np.float64)
        return p * self.sub_scale / self.parent_scale

    def to_json(self) -> dict:
        return {"parent_scale": self.parent_scale,
                "sub_scale": self.sub_scale,
                "exponent": self.exponent,
                "region": self.region.to_json(),
                "n_cells": self.n_cells,
                "interior_margin": self.interior_margin}


def sub_scale(L: int, a: float) -> int:
    """Cell side l = round(L**a)."""
    if not 0.0 < a < 1.0:
        raise ConfigurationError(f"sub-box exponent must be in (0, 1), got {a}")
    return max(1, int(round(L ** a)))


def partition_box(L: int, a: float, region: Rectangle,
                  gamma_log: float) -> BoxPartition:
    """Cells of side round(L**a) meeting L*region, margin ceil(gamma ln L)."""
    if L < 2:
        raise ConfigurationError(f"scale L must be >= 2, got {L}")
    if gamma_log <= 0.0:
        raise ConfigurationError("gamma_log must be positive")
    l = sub_scale(L, a)
    if l >= L:
        raise ConfigurationError(f"sub-box side {l} must be < L = {L}")
    margin = int(math.ceil(gamma_log * math.log(L)))
    ranges = []
    for lo, hi in zip(region.lows, region.highs):
        p_lo = math.floor(L * lo / l)
        p_hi = math.ceil(L * hi / l)
        ranges.append(range(p_lo, p_hi))
    gamma_set = tuple(product(*ranges))
    return BoxPartition(parent_scale=L, sub_scale=l, exponent=a,
                        region=region, gamma_set=gamma_set,
                        interior_margin=margin)


def boundary_distance(geom: BoxGeometry, coords: np.ndarray) -> np.ndarray:
    """Lattice distance of each site to the boundary layer of the box.

    For a box the nearest boundary site (a site with a neighbour outside)
    lies straight along some axis, so the distance is the smallest of the
    per-axis margins.
    """
    coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
    lo = np.asarray(geom.lows)
    hi = np.asarray(geom.highs)
    return np.minimum(coords - lo, hi - 1 - coords).min(axis=1)


def boundary_layers(geom: BoxGeometry, margin: int):
    """Interior sites and outward boundary pairs of a box.

    Returns (interior, pairs): interior is an (k, d) array of sites at
    lattice distance > margin from the boundary layer (may be empty, which
    is the caller's flag, not an error); pairs is a list of ((m, k)) with
    m in the boundary layer, k outside the box, |m - k| = 1.
    """
    if margin < 1:
        raise ConfigurationError(f"margin must be >= 1, got {margin}")
    coords = geom.coords()
    interior = coords[boundary_distance(geom, coords) > margin]
    pairs = []
    for j in range(geom.dim):
        for site in coords[coords[:, j] == geom.lows[j]]:
            out = site.copy()
            out[j] -= 1
            pairs.append((tuple(site), tuple(out)))
        for site in coords[coords[:, j] == geom.highs[j] - 1]:
            out = site.copy()
            out[j] += 1
            pairs.append((tuple(site), tuple(out)))
    return interior, pairs
