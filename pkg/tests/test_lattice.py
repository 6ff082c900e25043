import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from andersonlab.disorder import UNIFORM_DENSITY, DisorderSpec, SeedPath
from andersonlab.errors import ConfigurationError, ResourceError
from andersonlab.lattice import (BoxGeometry, FiniteHamiltonian, Rectangle,
                                 boundary_layers, build_hamiltonian, cube,
                                 energy_scale, interval, partition_box,
                                 sub_scale, unit_box)

SPEC = DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=8.0)
FREE = DisorderSpec(UNIFORM_DENSITY, (0.0, 1.0), coupling=0.0)


def test_single_edge_adjacency():
    H = build_hamiltonian(interval(0, 2), FREE, SeedPath(0, 0))
    assert np.array_equal(H.dense(), np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_tridiagonal_with_potential():
    H = FiniteHamiltonian(interval(0, 3), np.array([1.0, 2.0, 3.0]))
    want = np.array([[1.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 3.0]])
    assert np.array_equal(H.dense(), want)
    d, e = H.tridiagonal()
    assert np.array_equal(d, [1.0, 2.0, 3.0]) and np.array_equal(e, [1.0, 1.0])


def test_free_2x2_box_is_four_cycle():
    H = build_hamiltonian(cube(2, dim=2), FREE, SeedPath(0, 0))
    ev = np.sort(np.linalg.eigvalsh(H.dense()))
    assert np.allclose(ev, [-2.0, 0.0, 0.0, 2.0], atol=1e-12)


def test_row_sums_count_in_box_neighbours():
    for geom in (interval(0, 6), cube(4, dim=2), BoxGeometry((0, 0, 0), (2, 3, 2))):
        H = build_hamiltonian(geom, FREE, SeedPath(1, 0))
        sums = H.dense().sum(axis=1)
        coords = geom.coords()
        want = np.zeros(geom.n_sites)
        for j in range(geom.dim):
            want += (coords[:, j] > geom.lows[j])
            want += (coords[:, j] < geom.highs[j] - 1)
        assert np.array_equal(sums, want)
        assert sums.max() <= 2 * geom.dim


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.data())
def test_index_bijection_round_trips(dim, data):
    lows = tuple(data.draw(st.integers(-5, 5)) for _ in range(dim))
    shape = tuple(data.draw(st.integers(1, 4)) for _ in range(dim))
    geom = BoxGeometry(lows, tuple(l + s for l, s in zip(lows, shape)))
    coords = geom.coords()
    assert len(coords) == geom.n_sites
    assert np.array_equal(geom.index_of(coords), np.arange(geom.n_sites))


def test_build_is_reproducible():
    a = build_hamiltonian(cube(5, dim=2), SPEC, SeedPath(77, 3))
    b = build_hamiltonian(cube(5, dim=2), SPEC, SeedPath(77, 3))
    assert np.array_equal(a.potential, b.potential)
    assert np.array_equal(a.dense(), b.dense())


def test_subbox_potential_matches_host():
    host = build_hamiltonian(interval(0, 30), SPEC, SeedPath(4, 8))
    cell = build_hamiltonian(interval(10, 20), SPEC, SeedPath(4, 8))
    idx = host.geometry.index_of(cell.geometry.coords())
    assert np.array_equal(host.potential[idx], cell.potential)


def test_resource_limit():
    with pytest.raises(ResourceError):
        build_hamiltonian(interval(0, 200), SPEC, SeedPath(0, 0), max_sites=100)


def test_partition_aligned_1d():
    part = partition_box(100, 0.5, unit_box(1), gamma_log=2.0)
    assert part.sub_scale == 10
    assert part.n_cells == 10
    assert part.interior_margin == 10  # ceil(2 ln 100)
    counts = sum(c.n_sites for c in part.cells())
    assert counts == 100
    # Eq-style bound with equality for the aligned region
    assert part.n_cells <= (100 / part.sub_scale) ** 1 * 1.0 + 1e-9


def test_partition_grid_2d():
    part = partition_box(16, 0.5, unit_box(2), gamma_log=1.0)
    assert part.sub_scale == 4
    assert part.n_cells == 16
    cells = part.cells()
    seen = set()
    for c in cells:
        sites = {tuple(x) for x in c.coords()}
        assert not (seen & sites)
        seen |= sites
    assert seen == {(i, j) for i in range(16) for j in range(16)}


def test_partition_boundary_layer_count_bound():
    # |B \ int B| <= 2 d N_L l^{d-1}, exact-count check
    for L, dim in [(100, 1), (100, 2), (256, 2)]:
        part = partition_box(L, 0.5, unit_box(dim), gamma_log=4.0)
        cell = part.cell(0)
        n_l = part.interior_margin
        inter, _ = boundary_layers(cell, max(1, n_l))
        stripped = cell.n_sites - len(inter)
        assert stripped <= 2 * dim * max(1, n_l) * part.sub_scale ** (dim - 1)


def test_partition_rejects_subbox_not_smaller():
    with pytest.raises(ConfigurationError):
        partition_box(2, 0.9, unit_box(1), gamma_log=1.0)
    with pytest.raises(ConfigurationError):
        partition_box(100, 1.2, unit_box(1), gamma_log=1.0)
    with pytest.raises(ConfigurationError):
        partition_box(1, 0.5, unit_box(1), gamma_log=1.0)


def test_anchor_points():
    part = partition_box(100, 0.5, unit_box(1), gamma_log=1.0)
    assert np.allclose(part.anchors().ravel(),
                       np.arange(10) * 10 / 100)


def test_boundary_layers_1d_example():
    inter, pairs = boundary_layers(interval(0, 10), margin=2)
    assert sorted(x[0] for x in inter) == [3, 4, 5, 6]
    assert set(pairs) == {((0,), (-1,)), ((9,), (10,))}


def test_boundary_layers_margin_swallows_box():
    inter, _ = boundary_layers(interval(0, 10), margin=10)
    assert len(inter) == 0


def _brute_force_layers(geom, margin):
    # independent enumeration oracle over explicit site sets
    sites = {tuple(c) for c in geom.coords()}

    def neighbours(x):
        for j in range(len(x)):
            for dlt in (-1, 1):
                y = list(x)
                y[j] += dlt
                yield tuple(y)

    boundary = {x for x in sites if any(y not in sites for y in neighbours(x))}
    pairs = {(x, y) for x in boundary for y in neighbours(x) if y not in sites}

    def dist(x, layer):
        return min(sum(abs(a - b) for a, b in zip(x, y)) for y in layer)

    inter = {x for x in sites if dist(x, boundary) > margin}
    return inter, pairs


def test_boundary_layers_2d_against_brute_force():
    # frozen oracle values: the 4x4 box has no sites deeper than one layer,
    # the 6x6 box keeps its 2x2 core at margin 1
    inter4, pairs4 = boundary_layers(cube(4, dim=2), margin=1)
    oracle4, opairs4 = _brute_force_layers(cube(4, dim=2), 1)
    assert {tuple(x) for x in inter4} == oracle4 == set()
    assert set(pairs4) == opairs4
    assert len(pairs4) == 16

    inter6, pairs6 = boundary_layers(cube(6, dim=2), margin=1)
    oracle6, opairs6 = _brute_force_layers(cube(6, dim=2), 1)
    assert {tuple(x) for x in inter6} == oracle6 == \
        {(2, 2), (2, 3), (3, 2), (3, 3)}
    assert set(pairs6) == opairs6
    assert len(pairs6) == 24


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.integers(1, 3), st.data())
def test_boundary_layers_random_boxes_match_oracle(dim, margin, data):
    shape = tuple(data.draw(st.integers(1, 7)) for _ in range(dim))
    lows = tuple(data.draw(st.integers(-3, 3)) for _ in range(dim))
    geom = BoxGeometry(lows, tuple(l + s for l, s in zip(lows, shape)))
    inter, pairs = boundary_layers(geom, margin)
    oracle_inter, oracle_pairs = _brute_force_layers(geom, margin)
    assert {tuple(x) for x in inter} == oracle_inter
    assert set(pairs) == oracle_pairs


def test_energy_scale_exact_powers():
    assert energy_scale(1000, 1, 1.0) == 1000.0
    assert energy_scale(1000, 1, 0.5) == 1.0e6
    assert energy_scale(30, 2, 0.5) == 30.0 ** 4
    # non-integral exponent falls back to float pow
    assert energy_scale(100, 1, 0.7) == pytest.approx(100.0 ** (1 / 0.7))


def test_sub_scale_rounding():
    assert sub_scale(100, 0.5) == 10
    assert sub_scale(1000, 0.5) == 32
    assert sub_scale(200, 0.5) == 14


def test_rectangle_validation_and_sites():
    with pytest.raises(ConfigurationError):
        Rectangle((0.0,), (0.0,))
    q = Rectangle((0.0, -0.5), (1.0, 0.5))
    assert q.volume == pytest.approx(1.0)
    box = q.lattice_box(10)
    assert box.lows == (0, -5) and box.highs == (10, 5)
