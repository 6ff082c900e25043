"""Integrated density of states, its fractional derivatives, and the
scaled small-window scan.

The finite-volume proxy for the IDS is the disorder-averaged normalized
eigenvalue counting function E[#{E_j < E}] / |box|.  Fractional
derivatives are window ratios nu(x - eps, x + eps) / (2 eps)^alpha; the
limsup is approximated by the maximum over the computed tail of scales,
a documented stand-in since no finite computation sees the true limsup.

Window-mass sources share a tiny protocol: ``window_mass(lo, hi) ->
(mean, stderr)`` plus an ``energy_resolution`` attribute (0 for exact
counting sources).  Besides the Monte Carlo source there are synthetic
measures used for calibration and tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import disorder, kernels, lattice
from .errors import ConfigurationError, PrecisionError
from .lattice import energy_scale

DENSE_SIDE_LIMIT = 4000


@dataclass
class IdsTable:
    energies: np.ndarray
    nu_hat: np.ndarray
    stderr: np.ndarray
    n_sites: int
    n_realizations: int

    def to_csv(self, path):
        rows = ["energy,nu_hat,stderr"]
        for e, v, se in zip(self.energies, self.nu_hat, self.stderr):
            rows.append(f"{e!r},{v!r},{se!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


class MonteCarloIds:
    """Counting-based window-mass source on a fixed box.

    Caches one potential array per realization; every window query is an
    inertia count, so no eigenvectors and no dense matrices in d = 1.
    """

    energy_resolution = 0.0

    def __init__(self, spec: disorder.DisorderSpec, dim: int, box_side: int,
                 n_realizations: int, seed: disorder.SeedPath,
                 max_sites: int = lattice.MAX_SITES_DEFAULT):
        if n_realizations < 1:
            raise ConfigurationError("need at least one realization")
        self.spec = spec
        self.dim = dim
        self.geometry = lattice.cube(box_side, dim=dim)
        if self.geometry.n_sites > max_sites:
            raise ConfigurationError(f"box of {self.geometry.n_sites} sites "
                                     f"exceeds limit {max_sites}")
        self.n_realizations = n_realizations
        self.seed = seed
        self._potentials = None
        self._evals = None

    @property
    def n_sites(self) -> int:
        return self.geometry.n_sites

    def _ensure(self):
        if self._potentials is not None or self._evals is not None:
            return
        coords = self.geometry.coords()
        pots = np.empty((self.n_realizations, self.n_sites))
        for r in range(self.n_realizations):
            pots[r] = disorder.potential_at(self.spec, self.seed.shifted(dr=r),
                                            coords)
        if self.dim == 1:
            self._potentials = pots
        else:
            # higher dimensions at moderate size: cache sorted spectra
            adj = lattice.FiniteHamiltonian(self.geometry,
                                            np.zeros(self.n_sites)).dense()
            evals = np.empty_like(pots)
            for r in range(self.n_realizations):
                evals[r] = np.sort(sla.eigvalsh(adj + np.diag(pots[r])))
            self._evals = evals

    def counts_below(self, energies) -> np.ndarray:
        """Per-realization counts below each energy, shape (n_real, n_en)."""
        self._ensure()
        energies = np.asarray(energies, dtype=np.float64)
        out = np.empty((self.n_realizations, len(energies)), dtype=np.int64)
        if self.dim == 1:
            off = np.ones(self.n_sites - 1)
            for r in range(self.n_realizations):
                out[r] = kernels.count_below_grid(self._potentials[r], off,
                                                  energies)
        else:
            for r in range(self.n_realizations):
                out[r] = np.searchsorted(self._evals[r], energies, side="left")
        return out

    def window_mass(self, lo: float, hi: float):
        """(mean, stderr) of the per-site counting measure of [lo, hi)."""
        if not lo < hi:
            raise ConfigurationError(f"window must satisfy lo < hi, "
                                     f"got [{lo}, {hi})")
        counts = self.counts_below(np.array([lo, hi]))
        frac = (counts[:, 1] - counts[:, 0]) / self.n_sites
        se = (frac.std(ddof=1) / math.sqrt(self.n_realizations)
              if self.n_realizations > 1 else 0.0)
        return float(frac.mean()), float(se)


class TabulatedIds:
    """Window-mass source interpolating a finished IdsTable."""

    def __init__(self, table: IdsTable):
        self.table = table
        diffs = np.diff(table.energies)
        self.energy_resolution = float(diffs.max()) if len(diffs) else math.inf

    def window_mass(self, lo: float, hi: float):
        e, v = self.table.energies, self.table.nu_hat
        mass = float(np.interp(hi, e, v) - np.interp(lo, e, v))
        se_lo = float(np.interp(lo, e, self.table.stderr))
        se_hi = float(np.interp(hi, e, self.table.stderr))
        return mass, math.hypot(se_lo, se_hi)


class AtomicMeasure:
    """Point mass: the degenerate test measure (an atom at one energy)."""

    energy_resolution = 0.0

    def __init__(self, location: float, mass: float = 1.0):
        self.location = location
        self.mass = mass

    def window_mass(self, lo: float, hi: float):
        return (self.mass if lo <= self.location < hi else 0.0), 0.0


class FunctionMeasure:
    """Measure defined by an exact CDF callable (calibration helper)."""

    energy_resolution = 0.0

    def __init__(self, cdf):
        self.cdf = cdf

    def window_mass(self, lo: float, hi: float):
        return float(self.cdf(hi) - self.cdf(lo)), 0.0


def free_lattice_ids_1d(energy):
    """Exact IDS of the 1D free lattice operator: arccos(-E/2) / pi."""
    e = np.clip(np.asarray(energy, dtype=np.float64), -2.0, 2.0)
    return np.arccos(-e / 2.0) / np.pi


def estimate_ids(spec: disorder.DisorderSpec, dim: int, box_side: int,
                 energy_grid, n_realizations: int,
                 seed: disorder.SeedPath) -> IdsTable:
    """Monte Carlo IDS table on an energy grid."""
    grid = np.asarray(energy_grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) < 2 or not (np.diff(grid) > 0).all():
        raise ConfigurationError("energy grid must be strictly increasing")
    gmax = 2.0 * dim + spec.coupling * max(abs(spec.support[0]),
                                           abs(spec.support[1]))
    if grid[0] < -gmax - 1e-9 or grid[-1] > gmax + 1e-9:
        raise ConfigurationError(f"grid must lie within [{-gmax}, {gmax}]")
    src = MonteCarloIds(spec, dim, box_side, n_realizations, seed)
    counts = src.counts_below(grid) / src.n_sites
    nu = counts.mean(axis=0)
    se = (counts.std(axis=0, ddof=1) / math.sqrt(n_realizations)
          if n_realizations > 1 else np.zeros(len(grid)))
    return IdsTable(energies=grid, nu_hat=nu, stderr=se,
                    n_sites=src.n_sites, n_realizations=n_realizations)


@dataclass
class FracDerivEstimate:
    energy: float
    alpha: float
    epsilons: np.ndarray
    ratios: np.ndarray
    ratio_stderr: np.ndarray
    limit_estimate: float      # stabilized-tail value, nan if not stabilized
    limsup_estimate: float     # max over the scale tail (limsup proxy)
    stabilized: bool
    diverging: bool
    divergence_exponent: float

    def to_json(self) -> dict:
        return {"energy": self.energy, "alpha": self.alpha,
                "epsilons": self.epsilons.tolist(),
                "ratios": self.ratios.tolist(),
                "ratio_stderr": self.ratio_stderr.tolist(),
                "limit_estimate": self.limit_estimate,
                "limsup_estimate": self.limsup_estimate,
                "stabilized": self.stabilized,
                "diverging": self.diverging,
                "divergence_exponent": self.divergence_exponent,
                "note": "limsup proxy = max over computed tail; "
                        "true limsup is not finitely computable"}


def fractional_derivative(source, energy: float, alpha: float,
                          epsilons) -> FracDerivEstimate:
    """Window ratios nu(energy +- eps) / (2 eps)^alpha over shrinking eps."""
    eps = np.asarray(epsilons, dtype=np.float64)
    if eps.ndim != 1 or len(eps) < 3:
        raise ConfigurationError("need at least three epsilon scales")
    if not (np.diff(eps) < 0).all() or eps[-1] <= 0:
        raise ConfigurationError("epsilons must be strictly decreasing and positive")
    if not 0.0 < alpha <= 1.0:
        raise ConfigurationError(f"alpha must be in (0,1], got {alpha}")
    res = getattr(source, "energy_resolution", 0.0)
    if eps[-1] <= res:
        raise PrecisionError(f"smallest epsilon {eps[-1]} is at or below the "
                             f"source resolution {res}")
    ratios = np.empty(len(eps))
    stderr = np.empty(len(eps))
    for i, e in enumerate(eps):
        mass, se = source.window_mass(energy - e, energy + e)
        denom = (2.0 * e) ** alpha
        ratios[i] = mass / denom
        stderr[i] = se / denom
    last3 = ratios[-3:]
    spread = (last3.max() - last3.min())
    mean3 = last3.mean()
    stabilized = bool(mean3 > 0 and spread / mean3 <= 0.10)
    tail = ratios[-max(3, len(ratios) // 2):]
    tail_eps = eps[-max(3, len(ratios) // 2):]
    pos = tail > 0
    if pos.sum() >= 2:
        slope = np.polyfit(np.log(tail_eps[pos]), np.log(tail[pos]), 1)[0]
    else:
        slope = 0.0
    diverging = bool(slope < -0.2 and tail[-1] > 2.0 * ratios[0] > 0)
    return FracDerivEstimate(
        energy=energy, alpha=alpha, epsilons=eps, ratios=ratios,
        ratio_stderr=stderr,
        limit_estimate=float(mean3) if stabilized else float("nan"),
        limsup_estimate=float(tail.max()),
        stabilized=stabilized, diverging=diverging,
        divergence_exponent=float(slope))


@dataclass
class ScanResult:
    L_values: np.ndarray
    scaled_values: np.ndarray
    stderr: np.ndarray
    subsequence: np.ndarray    # L values attaining the running suffix max
    truncated: bool

    def limit_estimate(self) -> float:
        """Value along the selected subsequence (its final entry)."""
        sel = np.isin(self.L_values, self.subsequence)
        return float(self.scaled_values[sel][-1])

    def to_csv(self, path):
        rows = ["L,scaled_value,stderr,on_subsequence"]
        on = set(self.subsequence.tolist())
        for L, v, se in zip(self.L_values, self.scaled_values, self.stderr):
            rows.append(f"{L},{v!r},{se!r},{int(L in on)}")
        rows.append("# subsequence = running-suffix-max heuristic, not the "
                    "nonconstructive subsequence of the limit statement")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


def scaled_measure_scan(source, energy: float, halfwidth: float, alpha: float,
                        dim: int, L_list) -> ScanResult:
    """Values L^d * nu(energy +- halfwidth / L^(d/alpha)) along L_list."""
    if halfwidth <= 0:
        raise ConfigurationError("halfwidth must be positive")
    Ls = np.asarray(sorted(set(int(L) for L in L_list)), dtype=np.int64)
    if len(Ls) == 0:
        raise ConfigurationError("L_list must be nonempty")
    res = getattr(source, "energy_resolution", 0.0)
    vals, ses, kept = [], [], []
    truncated = False
    for L in Ls:
        beta = energy_scale(int(L), dim, alpha)
        w = halfwidth / beta
        if 2.0 * w < res:
            truncated = True
            import warnings

            warnings.warn(f"scan truncated at L = {L}: window {2 * w:g} "
                          f"below source resolution {res:g}")
            break
        mass, se = source.window_mass(energy - w, energy + w)
        vals.append(float(L) ** dim * mass)
        ses.append(float(L) ** dim * se)
        kept.append(int(L))
    vals = np.asarray(vals)
    ses = np.asarray(ses)
    kept = np.asarray(kept, dtype=np.int64)
    # suffix maxima: L_n attaining the running limsup from each point on
    sub = []
    if len(vals):
        suffix_max = np.maximum.accumulate(vals[::-1])[::-1]
        sub = [int(L) for L, v, m in zip(kept, vals, suffix_max) if v >= m]
    return ScanResult(L_values=kept, scaled_values=vals, stderr=ses,
                      subsequence=np.asarray(sub, dtype=np.int64),
                      truncated=truncated)
