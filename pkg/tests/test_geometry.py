import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from relayplan.geometry import (RelayLayout, build_grid, eps_min, inside_central_cell, nearest_in,
                                nearest_relay_of_type, place_relays, relay_sublattice, sample_cell)


@pytest.mark.parametrize("rings,count", [(0, 1), (1, 7), (2, 19), (10, 331)])
def test_cell_count(rings, count):
    g = build_grid(1.0, rings)
    assert g.n_cells == count == 1 + 3 * rings * (rings + 1)
    assert np.allclose(g.cell_centers[0], 0.0)


def test_first_ring_at_two_rc():
    g = build_grid(1.0, 1)
    assert np.allclose(np.hypot(*g.cell_centers[1:].T), 2.0, atol=1e-12)


@pytest.mark.parametrize("Rc", [1.0, 0.5, 2.3])
def test_neighbours_exactly_two_rc_apart(Rc):
    c = build_grid(Rc, 4).cell_centers
    d = np.hypot(c[:, None, 0] - c[None, :, 0], c[:, None, 1] - c[None, :, 1])
    np.fill_diagonal(d, np.inf)
    nearest = d.min(axis=1)
    assert np.allclose(nearest, 2 * Rc, atol=1e-9 * Rc)
    # neighbour pairs are exactly the pairs at the minimum distance; nothing closer
    assert np.all(d >= 2 * Rc * (1 - 1e-9))


def test_density_and_eps(grid10):
    assert grid10.density == pytest.approx(1 / (2 * np.sqrt(3)))
    assert grid10.eps_min == eps_min(1.0) == pytest.approx(1e-3)
    # one cell per lattice site: density * cell area = 1
    assert grid10.density * grid10.cell_area == pytest.approx(1.0)


def test_layout_validation():
    with pytest.raises(ValueError):
        RelayLayout(7, 0.5)
    with pytest.raises(ValueError):
        RelayLayout(-1, 0.5)


def test_no_relays_empty(grid10):
    pos, types, cells = place_relays(grid10, RelayLayout(0))
    assert len(pos) == len(types) == len(cells) == 0


def test_zero_radius_colocated(grid10):
    pos, _, _ = place_relays(grid10, RelayLayout(1, 0.0, 1.234))
    assert np.allclose(pos, grid10.cell_centers)


def test_three_relays_count_and_type_spacing(grid10):
    lay = RelayLayout(3, 0.7, 0.0)
    pos, types, cells = place_relays(grid10, lay)
    assert len(pos) == 993
    t1 = pos[types == 1]
    d = np.hypot(t1[:, None, 0] - t1[None, :, 0], t1[:, None, 1] - t1[None, :, 1])
    np.fill_diagonal(d, np.inf)
    assert np.allclose(d.min(axis=1), 2.0, atol=1e-9)


def test_relay_position_formula(grid10):
    lay = RelayLayout(4, 0.6, 0.3)
    pos, types, cells = place_relays(grid10, lay)
    for p, i, k in zip(pos[:40], types[:40], cells[:40]):
        a = 0.3 + 2 * np.pi * i / 4
        assert np.allclose(p, grid10.cell_centers[k] + 0.6 * np.array([np.cos(a), np.sin(a)]), atol=1e-12)


@given(n=st.integers(1, 6), RR=st.floats(0, 1), phi=st.floats(0, np.pi / 2), i=st.integers(1, 6))
@settings(max_examples=30, deadline=None)
def test_sublattice_is_translated_lattice(n, RR, phi, i):
    g = build_grid(1.0, 2)
    i = min(i, n)
    sub = relay_sublattice(g, RelayLayout(n, RR, phi), i)
    a = phi + 2 * np.pi * i / n
    assert np.allclose(sub - g.cell_centers, RR * np.array([np.cos(a), np.sin(a)]), atol=1e-12)


def test_nearest_at_relay_is_clamped(grid10):
    lay = RelayLayout(3, 0.7, 0.2)
    target = relay_sublattice(grid10, lay, 2)[0]
    k, d = nearest_relay_of_type(target, 2, lay, grid10)
    assert k == 0 and d == pytest.approx(grid10.eps_min)


def test_nearest_from_origin(grid10):
    k, d = nearest_relay_of_type(np.zeros(2), 1, RelayLayout(1, 0.7), grid10)
    assert k == 0 and d == pytest.approx(0.7)


def test_nearest_matches_brute_force(grid10):
    rng = np.random.default_rng(3)
    lay = RelayLayout(5, 0.83, 0.41)
    pts = rng.uniform(-1.2, 1.2, size=(1000, 2))
    for i in (1, 3, 5):
        sites = relay_sublattice(grid10, lay, i)
        k, d = nearest_relay_of_type(pts, i, lay, grid10)
        for p, kk, dd in zip(pts, k, d):
            dist = [np.hypot(*(p - s)) for s in sites]
            assert kk == int(np.argmin(dist))
            assert abs(dd - max(min(dist), grid10.eps_min)) < 1e-9


def test_nearest_tie_goes_to_lowest_index():
    sites = np.array([[1.0, 0.0], [-1.0, 0.0]])
    k, d = nearest_in(np.zeros((1, 2)), sites)
    assert k[0] == 0 and d[0] == 1.0


def test_inside_hexagon():
    assert inside_central_cell([[0, 0]], 1.0)[0]
    assert inside_central_cell([[0.99, 0]], 1.0)[0]
    assert not inside_central_cell([[1.0, 0]], 1.0)[0]          # on an edge
    assert inside_central_cell([[1.0, 0]], 1.0, strict=False)[0]
    assert not inside_central_cell([[0, 1.16]], 1.0)[0]         # beyond the vertex at 2/sqrt(3)
    assert inside_central_cell([[0, 1.15]], 1.0)[0]


@pytest.mark.parametrize("scheme", ["grid", "uniform"])
def test_samples_inside_and_nearest_enb_is_central(grid10, scheme):
    s = sample_cell(grid10, 5000, scheme, 1)
    assert np.all(inside_central_cell(s.positions, 1.0))
    d = np.hypot(s.positions[:, None, 0] - grid10.cell_centers[None, :7, 0],
                 s.positions[:, None, 1] - grid10.cell_centers[None, :7, 1])
    assert np.all(np.argmin(d, axis=1) == 0)


def test_grid_single_point(grid10):
    s = sample_cell(grid10, 1, "grid")
    assert len(s) >= 1
    assert np.all(inside_central_cell(s.positions, 1.0))


def test_grid_count_close_to_request(grid10):
    for N in (1000, 10_000):
        assert abs(len(sample_cell(grid10, N, "grid")) - N) / N < 0.02


def test_uniform_deterministic(grid10):
    a = sample_cell(grid10, 10_000, "uniform", 42).positions
    b = sample_cell(grid10, 10_000, "uniform", 42).positions
    c = sample_cell(grid10, 10_000, "uniform", 43).positions
    assert len(a) == 10_000
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def _hexagon_mean_radius(Rc):
    # oracle: integrate r over one of the 12 congruent right triangles
    # 0 <= x <= Rc, 0 <= y <= x / sqrt(3) (apothem along x)
    num, _ = integrate.dblquad(lambda y, x: np.hypot(x, y), 0, Rc, 0, lambda x: x / np.sqrt(3))
    area, _ = integrate.dblquad(lambda y, x: 1.0, 0, Rc, 0, lambda x: x / np.sqrt(3))
    return num / area


def test_uniform_mean_radius_matches_integral(grid10):
    s = sample_cell(grid10, 100_000, "uniform", 5)
    r = np.hypot(*s.positions.T)
    expected = _hexagon_mean_radius(1.0)
    assert expected == pytest.approx(0.70204, abs=1e-4)
    # standard error ~ 0.27 / sqrt(1e5) ~ 9e-4
    assert abs(r.mean() - expected) < 4e-3


def test_unknown_scheme(grid10):
    with pytest.raises(ValueError):
        sample_cell(grid10, 10, "sobol")
