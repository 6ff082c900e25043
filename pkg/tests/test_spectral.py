import numpy as np
import pytest

from andersonlab.disorder import UNIFORM_DENSITY, DisorderSpec, SeedPath
from andersonlab.errors import ConfigurationError, DomainError, ResourceError
from andersonlab.lattice import FiniteHamiltonian, build_hamiltonian, cube, interval
from andersonlab.spectral import (GreenQuery, SpectralData, count_in_window,
                                  eigensolve, green, green_column,
                                  local_weight, window_count,
                                  windowed_eigenpairs)

SPEC = DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=8.0)
FREE = DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=0.0)


def _random_h(n=24, seed=0, dim=1, side=None):
    if dim == 1:
        return build_hamiltonian(interval(0, n), SPEC, SeedPath(seed, 0))
    return build_hamiltonian(cube(side, dim=dim), SPEC, SeedPath(seed, 0))


def test_two_site_free_box():
    sd = eigensolve(build_hamiltonian(interval(0, 2), FREE, SeedPath(0, 0)))
    assert np.allclose(sd.eigenvalues, [-1.0, 1.0], atol=1e-14)
    assert np.allclose(sd.site_weights(0), [0.5, 0.5], atol=1e-14)


def test_counting_semantics_on_synthetic_spectrum():
    # hopping-free spectrum: eigenvalues (1, 2, 3) with indicator vectors
    sd = SpectralData(np.array([1.0, 2.0, 3.0]), np.eye(3))
    assert count_in_window(sd, (0.0, 2.0)) == 1
    assert count_in_window(sd, (-10.0, -5.0)) == 0
    assert count_in_window(sd, (0.0, 10.0)) == 3
    # half-open convention: lo included, hi excluded
    assert count_in_window(sd, (1.0, 2.0)) == 1
    assert count_in_window(sd, (1.0 + 1e-12, 2.0 + 1e-12)) == 1
    assert np.allclose(sd.site_weights(1), [0.0, 1.0, 0.0])
    with pytest.raises(ConfigurationError):
        count_in_window(sd, (2.0, 2.0))


def test_eigenvector_normalization_and_completeness():
    sd = eigensolve(_random_h(30, seed=5))
    w2 = sd.eigenvectors ** 2
    assert np.allclose(w2.sum(axis=0), 1.0, atol=1e-10)  # per eigenvector
    assert np.allclose(w2.sum(axis=1), 1.0, atol=1e-10)  # per site


def test_eigensolve_deterministic():
    a = eigensolve(_random_h(20, seed=2))
    b = eigensolve(_random_h(20, seed=2))
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_characteristic_polynomial_root_oracle():
    # independent oracle: Faddeev-LeVerrier coefficients, companion roots
    H = build_hamiltonian(interval(0, 8),
                          DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=2.0),
                          SeedPath(31, 0)).dense()
    n = 8
    # M_k = H (M_{k-1} + c_{k-1} I), c_k = -tr(M_k) / k
    M = H.copy()
    coeffs = [1.0, -np.trace(M)]
    for k in range(2, n + 1):
        M = H @ (M + coeffs[-1] * np.eye(n))
        coeffs.append(-np.trace(M) / k)
    roots = np.sort(np.roots(coeffs).real)
    sd = eigensolve(FiniteHamiltonian(interval(0, 8), H.diagonal().copy()))
    assert np.allclose(roots, sd.eigenvalues, atol=1e-8)


def test_local_weight_contracts():
    H = _random_h(6, seed=9)
    sd = eigensolve(H)
    full = (sd.eigenvalues[0] - 1.0, sd.eigenvalues[-1] + 1.0)
    # whole box reproduces the plain count
    assert local_weight(sd, full, range(6)) == pytest.approx(6.0, abs=1e-10)
    assert local_weight(sd, full, [0, 1, 2]) == pytest.approx(3.0, abs=1e-10)
    # a window between eigenvalues holds no weight
    gap = (sd.eigenvalues[2] + 1e-9, sd.eigenvalues[3] - 1e-9)
    if gap[0] < gap[1]:
        assert local_weight(sd, gap, range(6)) == 0.0
    with pytest.raises(DomainError):
        local_weight(sd, full, [7])


def test_degenerate_window_weight_is_basis_independent():
    # 2x2 free box: eigenvalues {-2, 0, 0, 2}; the 0-eigenspace projector
    # has diagonal 1/2 regardless of the orthonormal basis returned
    H = build_hamiltonian(cube(2, dim=2), FREE, SeedPath(0, 0))
    sd = eigensolve(H)
    for site in range(4):
        assert local_weight(sd, (-0.5, 0.5), [site]) == pytest.approx(0.5, abs=1e-12)


def test_green_scalar_resolvent():
    H = FiniteHamiltonian(interval(0, 1), np.array([2.5]))
    got = green(H, GreenQuery(z=1j, sites=((0, 0),)))
    # one-site box: G = 1 / (v - z)
    assert got[(0, 0)] == pytest.approx(1.0 / (2.5 - 1j), abs=1e-14)


def test_green_matches_spectral_representation():
    for dim, builder in [(1, lambda: _random_h(40, seed=3)),
                         (2, lambda: _random_h(seed=4, dim=2, side=5))]:
        H = builder()
        sd = eigensolve(H)
        z = 0.3 + 0.2j
        pairs = ((0, 0), (1, 5), (3, 3), (2, 7))
        got = green(H, GreenQuery(z=z, sites=pairs))
        for n, m in pairs:
            ref = np.sum(sd.eigenvectors[n] * sd.eigenvectors[m]
                         / (sd.eigenvalues - z))
            assert abs(got[(n, m)] - ref) < 1e-9


def test_green_herglotz_and_resolvent_bound():
    H = _random_h(30, seed=8)
    z = 1.0 + 0.05j
    vals = green(H, GreenQuery(z=z, sites=tuple((n, n) for n in range(30))))
    for v in vals.values():
        assert v.imag > 0.0
    col = green_column(H, z, 12)
    assert np.max(np.abs(col)) <= 1.0 / z.imag + 1e-12


def test_green_requires_upper_half_plane():
    with pytest.raises(DomainError):
        GreenQuery(z=1.0 - 0.1j, sites=((0, 0),))


def test_trace_formula_against_double_sum():
    # Tr(M_g f(H)) with f a cubic computed by direct matrix algebra
    H = build_hamiltonian(interval(0, 30),
                          DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=4.0),
                          SeedPath(17, 0))
    A = H.dense()
    g = np.linspace(0.5, 2.0, 30)
    fA = A @ A @ A - 2.0 * A + 0.75 * np.eye(30)
    direct = np.trace(np.diag(g) @ fA)
    sd = eigensolve(H)
    f_ev = sd.eigenvalues ** 3 - 2.0 * sd.eigenvalues + 0.75
    double = np.sum(f_ev[None, :] * g[:, None] * sd.eigenvectors ** 2)
    assert direct == pytest.approx(double, abs=1e-9)


@pytest.mark.parametrize("dim,side", [(1, 120), (2, 7)])
def test_window_count_matches_eigensolve(dim, side):
    H = _random_h(side, seed=6, dim=dim, side=side)
    sd = eigensolve(H)
    for win in [(-1.0, 1.0), (0.0, 4.0), (2.0, 2.5), (-50.0, 50.0)]:
        assert window_count(H, win) == count_in_window(sd, win)


def test_window_count_banded_path():
    H = _random_h(seed=10, dim=2, side=5)
    sd = eigensolve(H)
    for win in [(-1.0, 2.0), (3.0, 6.0)]:
        # dense_limit below the site count forces the banded LDL kernel
        assert window_count(H, win, dense_limit=10) == count_in_window(sd, win)


def test_windowed_eigenpairs_match_full_solve():
    H = _random_h(80, seed=12)
    sd = eigensolve(H)
    lo, hi = 1.0, 3.0
    w, v = windowed_eigenpairs(H, (lo, hi))
    mask = (sd.eigenvalues >= lo) & (sd.eigenvalues < hi)
    assert np.allclose(w, sd.eigenvalues[mask], atol=1e-10)
    assert w.shape[0] == v.shape[1]
    # weights agree up to eigenvector sign
    assert np.allclose(v ** 2, sd.eigenvectors[:, mask] ** 2, atol=1e-8)


def test_eigensolve_resource_limit():
    H = _random_h(50, seed=1)
    with pytest.raises(ResourceError):
        eigensolve(H, dense_limit=10)
