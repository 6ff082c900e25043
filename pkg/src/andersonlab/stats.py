"""Distributional tests: Wegner and Minami bounds, Poisson shape tests,
empirical characteristic functions, and the second-factorial-moment
remainder audit.

Everything here is a pure function of a finished sample stream; nothing
mutates samples.  Integer-valued testing uses the anchored counts; the
weight-valued host functional enters only through the gap trend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.stats as sps

from . import disorder, kernels, lattice, spectral
from .errors import ConfigurationError

POISSON_TAIL_EPS = 1e-12


@dataclass
class CountDistribution:
    """Empirical law of integer window counts."""

    histogram: dict[int, int]
    n: int
    mean: float
    variance: float
    target_intensity: float | None = None
    rounding_error: float = 0.0

    @classmethod
    def from_samples(cls, values, target_intensity: float | None = None
                     ) -> "CountDistribution":
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1 or len(vals) == 0:
            raise ConfigurationError("need a nonempty 1D sample array")
        rounded = np.rint(vals)
        rerr = float(np.max(np.abs(vals - rounded))) if len(vals) else 0.0
        ints = rounded.astype(np.int64)
        if (ints < 0).any():
            raise ConfigurationError("window counts must be nonnegative")
        hist: dict[int, int] = {}
        for k in ints:
            hist[int(k)] = hist.get(int(k), 0) + 1
        return cls(histogram=hist, n=len(ints), mean=float(ints.mean()),
                   variance=float(ints.var(ddof=1)) if len(ints) > 1 else 0.0,
                   target_intensity=target_intensity, rounding_error=rerr)

    def pmf(self) -> tuple[np.ndarray, np.ndarray]:
        kmax = max(self.histogram)
        ks = np.arange(kmax + 1)
        p = np.array([self.histogram.get(int(k), 0) for k in ks],
                     dtype=np.float64) / self.n
        return ks, p


def tv_distance_to_poisson(dist: CountDistribution, lam: float) -> float:
    """Total variation distance between the empirical law and Poisson(lam).

    Half the l1 distance over the union of supports; the Poisson tail
    beyond the observed support enters in full.
    """
    if lam < 0:
        raise ConfigurationError("Poisson parameter must be nonnegative")
    ks, p = dist.pmf()
    if lam == 0.0:
        q = np.zeros_like(p)
        q[0] = 1.0
    else:
        q = sps.poisson.pmf(ks, lam)
    tail = 1.0 - q.sum()
    return float(0.5 * (np.abs(p - q).sum() + max(tail, 0.0)))


@dataclass
class PoissonFitReport:
    n: int
    mean: float
    variance: float
    dispersion: float
    tv_to_poisson_mean: float
    chi2_stat: float
    chi2_pvalue: float
    chi2_dof: int
    target_intensity: float | None
    degenerate: bool
    all_zero: bool
    rounding_error: float
    tv_max: float
    dispersion_range: tuple[float, float]
    passed: bool

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["dispersion_range"] = list(self.dispersion_range)
        return d


def poisson_fit(dist: CountDistribution, tv_max: float = 0.1,
                dispersion_range: tuple[float, float] = (0.8, 1.2),
                min_samples: int = 1000) -> PoissonFitReport:
    """Shape test of integer counts against a Poisson law.

    Degenerate all-zero streams are flagged inconclusive (never a pass);
    otherwise pass requires TV(empirical, Poisson(mean)) <= tv_max and
    variance/mean inside dispersion_range.  The chi-square statistic is
    always reported, against Poisson(target_intensity) when a target is
    pinned and Poisson(mean) otherwise.
    """
    if dist.n < min_samples:
        raise ConfigurationError(f"need at least {min_samples} samples, "
                                 f"got {dist.n}")
    all_zero = (dist.mean == 0.0)
    degenerate = (dist.variance == 0.0)
    dispersion = dist.variance / dist.mean if dist.mean > 0 else 0.0
    tv = tv_distance_to_poisson(dist, dist.mean)
    lam = dist.target_intensity if dist.target_intensity is not None \
        else dist.mean
    fitted_from_data = dist.target_intensity is None
    chi2_stat, chi2_p, dof = _poisson_chi_square(dist, lam, fitted_from_data)
    passed = (not all_zero
              and tv <= tv_max
              and dispersion_range[0] <= dispersion <= dispersion_range[1])
    return PoissonFitReport(
        n=dist.n, mean=dist.mean, variance=dist.variance,
        dispersion=dispersion, tv_to_poisson_mean=tv, chi2_stat=chi2_stat,
        chi2_pvalue=chi2_p, chi2_dof=dof,
        target_intensity=dist.target_intensity, degenerate=degenerate,
        all_zero=all_zero, rounding_error=dist.rounding_error, tv_max=tv_max,
        dispersion_range=tuple(dispersion_range), passed=bool(passed))


def _poisson_chi_square(dist: CountDistribution, lam: float,
                        fitted_from_data: bool):
    """Chi-square over k-bins pooled so every expected count is >= 5.

    Bins partition all of {0, 1, 2, ...}: the last one absorbs the
    infinite Poisson tail, so expectations sum to n exactly.
    """
    if lam <= 0.0:
        return float("nan"), float("nan"), 0
    ks, p = dist.pmf()
    obs = p * dist.n
    exp = sps.poisson.pmf(ks, lam) * dist.n
    bins_o, bins_e = [], []
    acc_o = acc_e = 0.0
    for k in range(len(ks)):
        acc_o += obs[k]
        acc_e += exp[k]
        if acc_e >= 5.0:
            bins_o.append(acc_o)
            bins_e.append(acc_e)
            acc_o = acc_e = 0.0
    acc_e += dist.n * float(sps.poisson.sf(int(ks[-1]), lam))
    if bins_e and acc_e < 5.0:
        bins_o[-1] += acc_o
        bins_e[-1] += acc_e
    else:
        bins_o.append(acc_o)
        bins_e.append(acc_e)
    dof = len(bins_o) - 1 - (1 if fitted_from_data else 0)
    if dof < 1:
        return float("nan"), float("nan"), dof
    o = np.asarray(bins_o)
    e = np.asarray(bins_e)
    stat = float(np.sum((o - e) ** 2 / e))
    return stat, float(sps.chi2.sf(stat, dof)), dof


@dataclass
class CharFnProfile:
    t_grid: np.ndarray
    empirical: np.ndarray
    target: np.ndarray
    sup_distance: float

    def to_json(self) -> dict:
        return {"t_grid": self.t_grid.tolist(),
                "empirical_re": self.empirical.real.tolist(),
                "empirical_im": self.empirical.imag.tolist(),
                "target_re": self.target.real.tolist(),
                "target_im": self.target.imag.tolist(),
                "sup_distance": self.sup_distance}


def charfn_profile(samples, t_grid, intensity: float) -> CharFnProfile:
    """Empirical E[exp(itN)] against the Poisson target exp(gamma(e^it - 1))."""
    t = np.asarray(t_grid, dtype=np.float64)
    if t.size == 0 or t.min() < -math.pi - 1e-12 or t.max() > math.pi + 1e-12:
        raise ConfigurationError("t grid must lie inside [-pi, pi]")
    vals = np.asarray(samples, dtype=np.float64)
    emp = np.exp(1j * np.outer(t, vals)).mean(axis=1)
    target = np.exp(intensity * (np.exp(1j * t) - 1.0))
    assert np.all(np.abs(emp) <= 1.0 + 1e-12)
    return CharFnProfile(t_grid=t, empirical=emp, target=target,
                         sup_distance=float(np.max(np.abs(emp - target))))


@dataclass
class BoundCheckReport:
    """Monte Carlo check of a concentration-type inequality."""

    statistic: str
    empirical_mean: float
    stderr: float
    bound: float
    n_realizations: int
    window: tuple[float, float]
    n_sites: int
    bound_trivial: bool
    passed: bool

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["window"] = list(self.window)
        return d


def _window_count_sweep(spec, geom, window, n_realizations, seed):
    lo, hi = window
    if not lo < hi:
        raise ConfigurationError(f"window must satisfy lo < hi, got {window}")
    counts = np.empty(n_realizations)
    if geom.dim == 1:
        coords = geom.coords()
        off = np.ones(geom.n_sites - 1)
        for r in range(n_realizations):
            pot = disorder.potential_at(spec, seed.shifted(dr=r), coords)
            counts[r] = kernels.count_window(pot, off, lo, hi)
    else:
        for r in range(n_realizations):
            H = lattice.build_hamiltonian(geom, spec, seed.shifted(dr=r))
            counts[r] = spectral.window_count(H, window)
    return counts


def wegner_check(spec: disorder.DisorderSpec, geom: lattice.BoxGeometry,
                 window: tuple[float, float], n_realizations: int,
                 seed: disorder.SeedPath) -> BoundCheckReport:
    """E[Tr E(I)] <= Q(|I|) |box| with three-sigma Monte Carlo slack.

    For coupled disorder the bound uses the concentration of the scaled
    law, Q(|I| / g) on the unscaled mu.
    """
    if n_realizations < 500:
        raise ConfigurationError("need at least 500 realizations")
    counts = _window_count_sweep(spec, geom, window, n_realizations, seed)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(n_realizations))
    width = window[1] - window[0]
    q = disorder.coupled_wegner_constant(spec, width)
    bound = q * geom.n_sites
    return BoundCheckReport(statistic="mean_window_count",
                            empirical_mean=mean, stderr=se, bound=bound,
                            n_realizations=n_realizations, window=window,
                            n_sites=geom.n_sites, bound_trivial=q >= 1.0,
                            passed=bool(mean - 3.0 * se <= bound))


def minami_check(spec: disorder.DisorderSpec, geom: lattice.BoxGeometry,
                 window: tuple[float, float], n_realizations: int,
                 seed: disorder.SeedPath) -> BoundCheckReport:
    """E[N(N - 1)] <= (Q(|I|) |box|)^2, the second factorial moment bound."""
    if n_realizations < 500:
        raise ConfigurationError("need at least 500 realizations")
    counts = _window_count_sweep(spec, geom, window, n_realizations, seed)
    stat = counts * (counts - 1.0)
    mean = float(stat.mean())
    se = float(stat.std(ddof=1) / math.sqrt(n_realizations))
    width = window[1] - window[0]
    q = disorder.coupled_wegner_constant(spec, width)
    bound = (q * geom.n_sites) ** 2
    return BoundCheckReport(statistic="second_factorial_moment",
                            empirical_mean=mean, stderr=se, bound=bound,
                            n_realizations=n_realizations, window=window,
                            n_sites=geom.n_sites, bound_trivial=q >= 1.0,
                            passed=bool(mean - 3.0 * se <= bound))


@dataclass
class RemainderAudit:
    """Scaling of #cells * E[N(N-1)] against the cell/box size ratio."""

    L_values: np.ndarray
    audit_values: np.ndarray
    slope: float
    target_slope: float
    rel_error: float
    slope_tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return {"L_values": self.L_values.tolist(),
                "audit_values": self.audit_values.tolist(),
                "slope": self.slope, "target_slope": self.target_slope,
                "rel_error": self.rel_error,
                "slope_tolerance": self.slope_tolerance,
                "passed": self.passed}


def predicted_audit_ratio(dim: int, exponent_a: float,
                          scale_factor: float = 2.0) -> float:
    """Predicted multiplicative drop of the audit value when L scales."""
    return scale_factor ** (-dim * (1.0 - exponent_a))


def remainder_audit(cell_counts_by_L: dict[int, np.ndarray], dim: int,
                    exponent_a: float, slope_tol: float = 0.3
                    ) -> RemainderAudit:
    """Fit log(#cells * mean N(N-1)) against log L; target slope -d(1-a).

    cell_counts_by_L maps L to an (n_realizations, n_cells) integer array
    of per-cell anchored counts.
    """
    if len(cell_counts_by_L) < 2:
        raise ConfigurationError("need at least two scales to fit a slope")
    Ls = np.array(sorted(cell_counts_by_L), dtype=np.float64)
    audits = []
    for L in Ls:
        counts = np.asarray(cell_counts_by_L[int(L)], dtype=np.float64)
        n_cells = counts.shape[1]
        audits.append(n_cells * float((counts * (counts - 1.0)).mean()))
    audits = np.array(audits)
    target = -dim * (1.0 - exponent_a)
    usable = audits > 0
    if usable.sum() < 2:
        return RemainderAudit(Ls.astype(np.int64), audits, float("nan"),
                              target, float("inf"), slope_tol, False)
    slope = float(np.polyfit(np.log(Ls[usable]), np.log(audits[usable]), 1)[0])
    rel = abs(slope - target) / abs(target)
    return RemainderAudit(L_values=Ls.astype(np.int64), audit_values=audits,
                          slope=slope, target_slope=target, rel_error=rel,
                          slope_tolerance=slope_tol,
                          passed=bool(rel <= slope_tol))
