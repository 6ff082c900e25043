import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from andersonlab.disorder import (ALPHA_POWER, UNIFORM_DENSITY, DisorderSpec,
                                  SeedPath, concentration,
                                  coupled_wegner_constant, potential_at,
                                  sample_potential, wegner_constant)
from andersonlab.errors import ConfigurationError, DomainError

UNI = DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0))
POW_HALF = DisorderSpec(ALPHA_POWER, (0.0, 1.0), alpha=0.5)


def test_uniform_support_containment():
    v = sample_potential(UNI, SeedPath(7, 0), 5000)
    assert (v >= 0.0).all() and (v <= 1.0).all()


def test_alpha_power_inverse_cdf_value():
    # F(x) = x^0.5 so F^{-1}(u) = u^2
    assert POW_HALF.inverse_cdf(0.25) == pytest.approx(0.0625, abs=1e-15)


def test_determinism_same_seedpath():
    a = sample_potential(POW_HALF, SeedPath(123, 4), 100)
    b = sample_potential(POW_HALF, SeedPath(123, 4), 100)
    assert np.array_equal(a, b)


def test_stream_chunks_concatenate():
    # worker-count independence: drawing [0, 100) equals [0, 30) + [30, 100)
    whole = sample_potential(UNI, SeedPath(5, 2), 100)
    head = sample_potential(UNI, SeedPath(5, 2, site_index=0), 30)
    tail = sample_potential(UNI, SeedPath(5, 2, site_index=30), 70)
    assert np.array_equal(whole, np.concatenate([head, tail]))


def test_coordinate_draws_order_independent():
    coords = np.array([[3, 1], [0, 0], [-2, 5], [7, 7]])
    perm = [2, 0, 3, 1]
    v = potential_at(UNI, SeedPath(9, 1), coords)
    w = potential_at(UNI, SeedPath(9, 1), coords[perm])
    assert np.array_equal(v[perm], w)


def test_realizations_differ():
    a = sample_potential(UNI, SeedPath(1, 0), 50)
    b = sample_potential(UNI, SeedPath(1, 1), 50)
    assert not np.array_equal(a, b)


def test_coupling_scales_values():
    g = DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=8.0)
    a = sample_potential(UNI, SeedPath(3, 0), 64)
    b = sample_potential(g, SeedPath(3, 0), 64)
    assert np.allclose(b, 8.0 * a)


@pytest.mark.parametrize("spec", [UNI, POW_HALF], ids=["uniform", "power"])
def test_empirical_cdf_matches_analytic(spec):
    import scipy.stats as st_

    v = sample_potential(spec, SeedPath(20260809, 0), 100_000)
    ks = st_.kstest(v, spec.cdf).statistic
    assert ks <= 0.01


def test_concentration_uniform():
    assert concentration(UNI, 0.1) == pytest.approx(0.1, abs=1e-15)


def test_concentration_alpha_power_exact():
    # sup at a = 0 by concavity of x^alpha
    assert concentration(POW_HALF, 0.04) == pytest.approx(0.2, abs=1e-15)


def test_concentration_alpha_power_brute_force_oracle():
    # independent oracle: sup of F(a+s) - F(a) over a grid of step 1e-6
    s = 0.04
    a = np.arange(0.0, 1.0 - s, 1e-6)
    sup = np.max(POW_HALF.cdf(a + s) - POW_HALF.cdf(a))
    assert concentration(POW_HALF, s) == pytest.approx(sup, abs=1e-6)
    assert sup == pytest.approx(0.2, abs=1e-6)


def test_wegner_constant_bounded_density_branch():
    assert wegner_constant(UNI, 0.2) == pytest.approx(0.2, abs=1e-15)


def test_wegner_constant_concentration_branch():
    assert wegner_constant(POW_HALF, 0.04) == pytest.approx(1.6, abs=1e-15)


def test_wegner_constant_vanishes_monotonically():
    widths = np.logspace(0, -8, 30)
    for spec in (UNI, POW_HALF):
        q = [wegner_constant(spec, s) for s in widths]
        assert all(a >= b for a, b in zip(q, q[1:]))
        assert q[-1] < 1e-3


def test_coupled_wegner_uses_scaled_width():
    g = DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=8.0)
    assert coupled_wegner_constant(g, 0.4) == pytest.approx(0.05, abs=1e-15)
    p = DisorderSpec(ALPHA_POWER, (0.0, 1.0), alpha=0.5, coupling=2.0)
    assert coupled_wegner_constant(p, 0.08) == \
        pytest.approx(8.0 * 0.04 ** 0.5, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1.0),
       st.sampled_from([0.3, 0.5, 0.8, 1.0]))
def test_holder_bound_on_concentration(s, alpha):
    # uniform alpha-Holder continuity S(s) <= U s^alpha with U = 1
    spec = (DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0)) if alpha == 1.0
            else DisorderSpec(ALPHA_POWER, (0.0, 1.0), alpha=alpha))
    assert concentration(spec, s) <= spec.holder_const * s ** alpha + 1e-15


def test_invalid_specs_rejected():
    with pytest.raises(ConfigurationError):
        DisorderSpec("Gaussian")
    with pytest.raises(ConfigurationError):
        DisorderSpec(UNIFORM_DENSITY, (1.0, 1.0))
    with pytest.raises(ConfigurationError):
        DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), alpha=0.5)
    with pytest.raises(ConfigurationError):
        DisorderSpec(ALPHA_POWER, (0.0, 2.0), alpha=0.5)
    with pytest.raises(ConfigurationError):
        DisorderSpec(ALPHA_POWER, (0.0, 1.0), alpha=1.5)
    with pytest.raises(ConfigurationError):
        DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=-1.0)
    with pytest.raises(ConfigurationError):
        sample_potential(UNI, SeedPath(0, 0), 0)
    with pytest.raises(ConfigurationError):
        SeedPath(0, -1)
    with pytest.raises(DomainError):
        concentration(UNI, 0.0)


def test_zero_coupling_allowed_for_free_lattice():
    free = DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=0.0)
    assert (sample_potential(free, SeedPath(0, 0), 10) == 0.0).all()


def test_json_round_trip():
    spec = DisorderSpec(ALPHA_POWER, (0.0, 1.0), alpha=0.5, holder_const=1.0,
                        coupling=2.0)
    assert DisorderSpec.from_json(spec.to_json()) == spec
    with pytest.raises(ConfigurationError):
        DisorderSpec.from_json({"family": ALPHA_POWER})
