"""Single-site disorder laws and deterministic seed-splitting.

Two families of single-site distributions mu are implemented, both with
compact support and exact concentration functions:

* ``UniformDensity``: constant density on [v_min, v_max]; Holder exponent
  alpha = 1 with S(s) = min(s / width, 1).
* ``AlphaPower``: CDF F(x) = x**alpha on [0, 1] for alpha in (0, 1];
  S(s) = min(s, 1)**alpha (the sup is attained at a = 0 by concavity).

Sampling is inverse-CDF on stateless uniforms: every draw is a pure
function of (master_seed, realization_index, site_key), so streams do not
depend on site enumeration order or on how realizations are distributed
over workers, and a sub-box reuses exactly the draws of its host box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

UNIFORM_DENSITY = "UniformDensity"
ALPHA_POWER = "AlphaPower"
FAMILIES = (UNIFORM_DENSITY, ALPHA_POWER)

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SALT_REALIZATION = 0xD1B54A32D192ED03
_SALT_AXIS = 0x8CB92BA72F3D8DD7


def _mix_scalar(z: int) -> int:
    """splitmix64 finalizer on a Python int (mod 2^64)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def stream_base(master_seed: int, realization_index: int) -> int:
    """Per-realization 64-bit base key."""
    h = _mix_scalar(master_seed + _GOLDEN)
    return _mix_scalar(h ^ ((realization_index * _SALT_REALIZATION) & _MASK))


def uniform01(master_seed: int, realization_index: int,
              keys: np.ndarray) -> np.ndarray:
    """Uniforms in [0, 1), one per key; stateless and order-independent."""
    base = stream_base(master_seed, realization_index)
    z = keys.astype(np.uint64, copy=False) * np.uint64(_GOLDEN) + np.uint64(base)
    z = _mix_vec(z)
    z = _mix_vec(z ^ np.uint64(_GOLDEN))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def site_keys(coords: np.ndarray) -> np.ndarray:
    """64-bit site keys for lattice coordinates, shape (n, d) -> (n,).

    In one dimension the key is the coordinate itself (so plain indexed
    streams and 1D boxes agree); in higher dimensions the coordinates are
    folded through the mixer with a per-axis salt.
    """
    coords = np.asarray(coords, dtype=np.int64)
    if coords.ndim == 1:
        coords = coords[:, None]
    d = coords.shape[1]
    if d == 1:
        return coords[:, 0].astype(np.uint64)
    k = np.full(coords.shape[0], _mix_scalar(0xA0761D6478BD642F ^ d),
                dtype=np.uint64)
    for j in range(d):
        cj = coords[:, j].astype(np.uint64)
        k = _mix_vec(k ^ (cj * np.uint64(_GOLDEN)
                          + np.uint64((j + 1) * _SALT_AXIS & _MASK)))
    return k


@dataclass(frozen=True)
class SeedPath:
    """Addresses one stream position: (master seed, realization, site)."""

    master_seed: int
    realization_index: int = 0
    site_index: int = 0

    def __post_init__(self):
        if self.realization_index < 0 or self.site_index < 0:
            raise ConfigurationError("realization_index and site_index must "
                                     "be nonnegative")

    def shifted(self, dr: int = 0, ds: int = 0) -> "SeedPath":
        return SeedPath(self.master_seed, self.realization_index + dr,
                        self.site_index + ds)


@dataclass(frozen=True)
class DisorderSpec:
    """A single-site law mu plus the coupling that multiplies its draws."""

    family: str
    support: tuple[float, float] = (0.0, 1.0)
    alpha: float = 1.0
    holder_const: float = 1.0
    coupling: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}")
        lo, hi = self.support
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ConfigurationError(f"empty or unbounded support {self.support}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.family == UNIFORM_DENSITY and self.alpha != 1.0:
            raise ConfigurationError("UniformDensity requires alpha = 1")
        if self.family == ALPHA_POWER and self.support != (0.0, 1.0):
            raise ConfigurationError("AlphaPower is defined on support (0, 1)")
        if self.holder_const <= 0.0:
            raise ConfigurationError("holder_const must be positive")
        # coupling 0 is the free lattice (negative control); negative is not
        if self.coupling < 0.0:
            raise ConfigurationError("coupling must be nonnegative")

    @property
    def width(self) -> float:
        return self.support[1] - self.support[0]

    @property
    def density_sup(self) -> float:
        """sup of the density, defined for the bounded-density family."""
        if self.family != UNIFORM_DENSITY:
            raise ConfigurationError(f"{self.family} has no bounded density")
        return 1.0 / self.width

    def inverse_cdf(self, u):
        """Quantile function of the unscaled mu (before coupling)."""
        u = np.asarray(u, dtype=np.float64)
        lo, hi = self.support
        if self.family == UNIFORM_DENSITY:
            return lo + u * (hi - lo)
        return u ** (1.0 / self.alpha)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        lo, hi = self.support
        if self.family == UNIFORM_DENSITY:
            return np.clip((x - lo) / (hi - lo), 0.0, 1.0)
        return np.clip(x, 0.0, 1.0) ** self.alpha

    def to_json(self) -> dict:
        return {"family": self.family,
                "support": [self.support[0], self.support[1]],
                "alpha": self.alpha,
                "holder_const": self.holder_const,
                "coupling": self.coupling}

    @classmethod
    def from_json(cls, obj: dict) -> "DisorderSpec":
        try:
            return cls(family=obj["family"],
                       support=(float(obj["support"][0]),
                                float(obj["support"][1])),
                       alpha=float(obj.get("alpha", 1.0)),
                       holder_const=float(obj.get("holder_const", 1.0)),
                       coupling=float(obj.get("coupling", 1.0)))
        except (KeyError, TypeError, IndexError) as exc:
            raise ConfigurationError(f"bad disorder spec object: {exc}") from exc


def sample_potential(spec: DisorderSpec, seed: SeedPath, n_sites: int) -> np.ndarray:
    """n_sites coupled draws g*omega at stream positions site_index + 0..n-1."""
    if n_sites < 1:
        raise ConfigurationError("n_sites must be >= 1")
    keys = (np.arange(n_sites, dtype=np.uint64)
            + np.uint64(seed.site_index & _MASK))
    u = uniform01(seed.master_seed, seed.realization_index, keys)
    return spec.coupling * spec.inverse_cdf(u)


def potential_at(spec: DisorderSpec, seed: SeedPath, coords: np.ndarray) -> np.ndarray:
    """Coupled draws keyed by absolute lattice coordinates.

    A sub-box and its host box receive identical values at shared sites,
    which is what couples restricted and global Hamiltonians statistically.
    """
    u = uniform01(seed.master_seed, seed.realization_index, site_keys(coords))
    return spec.coupling * spec.inverse_cdf(u)


def concentration(spec: DisorderSpec, s: float) -> float:
    """S(s) = sup_a mu[a, a+s] of the unscaled mu, exactly."""
    if s <= 0.0:
        raise DomainError(f"concentration width must be positive, got {s}")
    if spec.family == UNIFORM_DENSITY:
        return min(s / spec.width, 1.0)
    return min(s, 1.0) ** spec.alpha


def wegner_constant(spec: DisorderSpec, s: float) -> float:
    """Q(s): density_sup * s for the bounded-density family, else 8 S(s)."""
    if spec.family == UNIFORM_DENSITY:
        return spec.density_sup * s
    return 8.0 * concentration(spec, s)


def coupled_wegner_constant(spec: DisorderSpec, s: float) -> float:
    """Q of the law of g*omega, expressed through the unscaled mu.

    Scaling by g shrinks interval widths by 1/g, so Q_{g mu}(s) = Q_mu(s/g).
    For g = 0 the law is a point mass and S == 1.
    """
    if spec.coupling == 0.0:
        return 8.0
    return wegner_constant(spec, s / spec.coupling)
