"""Fractional-moment decay of Green's functions.

Monte Carlo estimate of E|G(z; n, m)|^s over independent disorder
realizations, binned by lattice distance and fitted to log E|G|^s =
log C - r |n - m|.  The fitted rate r is an estimate with error bars,
never a certified constant; downstream code treats it that way.

Also the interior-margin prefactor threshold: the log-margin prefactor
gamma must exceed (1/r) [ (1-s) d / alpha + d + (d-1) a ] for the
boundary terms of the box-decoupling argument to vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import disorder, lattice, spectral
from .errors import ConfigurationError, DomainError


@dataclass
class DecayEstimate:
    s: float
    z: complex
    distances: np.ndarray
    log_means: np.ndarray
    log_stderr: np.ndarray
    log_amplitude: float   # intercept log C
    rate: float            # decay rate r (slope is -r)
    r_squared: float
    n_realizations: int

    def to_json(self) -> dict:
        return {"s": self.s, "z": [self.z.real, self.z.imag],
                "distances": self.distances.tolist(),
                "log_means": self.log_means.tolist(),
                "log_stderr": self.log_stderr.tolist(),
                "log_amplitude": self.log_amplitude,
                "rate": self.rate, "r_squared": self.r_squared,
                "n_realizations": self.n_realizations}

    def to_csv(self, path):
        rows = ["distance,log_mean,stderr"]
        for d, m, se in zip(self.distances, self.log_means, self.log_stderr):
            rows.append(f"{d},{m!r},{se!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


def axial_pairs(geom: lattice.BoxGeometry, distances, axis: int = 0):
    """Site-index pairs (center, center + k e_axis) for the given distances.

    Pinned to the box center to keep the probe away from the boundary.
    """
    center = tuple((l + h - 1) // 2 for l, h in zip(geom.lows, geom.highs))
    pairs = []
    for k in distances:
        other = list(center)
        other[axis] += int(k)
        if not geom.contains(np.array([other])).all():
            raise ConfigurationError(f"distance {k} leaves the box along "
                                     f"axis {axis}")
        pairs.append((center, tuple(other)))
    return pairs


def estimate_fractional_moments(spec: disorder.DisorderSpec,
                                geom: lattice.BoxGeometry,
                                s: float, z: complex, pairs,
                                n_realizations: int,
                                seed: disorder.SeedPath) -> DecayEstimate:
    """Fit log E|G(z; n, m)|^s against |n - m| over a realization sweep."""
    if not 0.0 < s < 1.0:
        raise ConfigurationError(f"fractional exponent s must be in (0,1), got {s}")
    if not complex(z).imag > 0.0:
        raise DomainError(f"probe z must have Im z > 0, got {z}")
    if n_realizations < 100:
        raise ConfigurationError("need at least 100 realizations")
    srcs = [np.asarray(p[0], dtype=np.int64) for p in pairs]
    dsts = [np.asarray(p[1], dtype=np.int64) for p in pairs]
    dists = np.array([int(np.abs(a - b).sum()) for a, b in zip(srcs, dsts)])
    uniq = np.unique(dists)
    if len(uniq) < 4:
        raise ConfigurationError(f"pairs span only {len(uniq)} distinct "
                                 "distances; need at least 4")

    src_idx = [int(geom.index_of(c)[0]) for c in srcs]
    dst_idx = [int(geom.index_of(c)[0]) for c in dsts]
    by_source = {}
    for k, si in enumerate(src_idx):
        by_source.setdefault(si, []).append(k)

    # per-realization means within each distance bin
    binned = np.zeros((n_realizations, len(uniq)))
    dist_slot = {d: i for i, d in enumerate(uniq)}
    for r in range(n_realizations):
        H = lattice.build_hamiltonian(geom, spec, seed.shifted(dr=r))
        per_bin = {d: [] for d in uniq}
        for si, pair_ids in by_source.items():
            col = spectral.green_column(H, z, si)
            for k in pair_ids:
                per_bin[dists[k]].append(abs(col[dst_idx[k]]) ** s)
        for d, vals in per_bin.items():
            binned[r, dist_slot[d]] = np.mean(vals)

    means = binned.mean(axis=0)
    stderr = binned.std(axis=0, ddof=1) / np.sqrt(n_realizations)
    log_means = np.log(means)
    log_stderr = stderr / means

    slope, intercept = np.polyfit(uniq.astype(float), log_means, 1)
    fitted = intercept + slope * uniq
    ss_res = float(np.sum((log_means - fitted) ** 2))
    ss_tot = float(np.sum((log_means - log_means.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return DecayEstimate(s=s, z=complex(z), distances=uniq,
                         log_means=log_means, log_stderr=log_stderr,
                         log_amplitude=float(intercept), rate=float(-slope),
                         r_squared=float(r2), n_realizations=n_realizations)


def margin_threshold(r: float, s: float, d: int, alpha: float, a: float) -> float:
    """Lower bound the log-margin prefactor must exceed, (1/r)[(1-s)d/alpha + d + (d-1)a]."""
    if r <= 0.0:
        raise DomainError("decay rate must be positive (no verified "
                          "localization at r <= 0)")
    if not 0.0 < s < 1.0:
        raise ConfigurationError(f"s must be in (0,1), got {s}")
    if not 0.0 < alpha <= 1.0:
        raise ConfigurationError(f"alpha must be in (0,1], got {alpha}")
    if not 0.0 < a < 1.0:
        raise ConfigurationError(f"a must be in (0,1), got {a}")
    if d < 1:
        raise ConfigurationError(f"dimension must be >= 1, got {d}")
    return ((1.0 - s) * d / alpha + d + (d - 1) * a) / r
