import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relayplan.geometry import RelayLayout, sample_cell
from relayplan.propagation import PropagationParams
from relayplan.sinr_exact import ENB, exact_terms
from relayplan.sinr_fluid import (DivergentInterferenceError, FluidInputs, fluid_field, fluid_interference,
                                  gamma0_fluid, gamma_ik_fluid, i2_fluid, i3_fluid, nearest_distances,
                                  omega_i_fluid, omega_ij_fluid, sinr_backhaul_fluid, sinr_enb_fluid,
                                  sinr_relay_fluid)

RHO = 1 / (2 * np.sqrt(3))


def _inputs(r, ri, params=None, PR_dbm=None):
    return FluidInputs(np.asarray(r, float), np.asarray(ri, float), params or PropagationParams(), 1.0, RHO, PR_dbm)


def test_kernel_trivial_cases(params):
    assert fluid_interference(0.5, 0.0, params.P, params.K, params.eta, 1.0) == 0.0
    a = fluid_interference(0.5, RHO, params.P, params.K, params.eta, 1.0)
    assert fluid_interference(0.5, RHO, 3 * params.P, params.K, params.eta, 1.0) == pytest.approx(3 * a)
    assert fluid_interference(0.5, 2 * RHO, params.P, params.K, params.eta, 1.0) == pytest.approx(2 * a)
    expected = 2 * np.pi * RHO * params.P * params.K * 1.5 ** (2 - params.eta) / (params.eta - 2)
    assert a == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("eta", [2.0, 1.9])
def test_kernel_diverges(eta, params):
    with pytest.raises(DivergentInterferenceError):
        fluid_interference(0.5, RHO, params.P, params.K, eta, 1.0)


def test_kernel_vs_discrete_sum_at_cell_edge(grid10, params):
    # discrete-sum oracle at the edge midpoint (distance Rc from the eNB)
    u = np.array([1.0, 0.0])
    d = np.hypot(*(grid10.cell_centers[1:] - u).T)
    discrete = np.sum(params.P * params.K * d ** -params.eta)
    fluid = fluid_interference(1.0, grid10.density, params.P, params.K, params.eta, 1.0)
    assert fluid / discrete == pytest.approx(1.0, rel=0.10), f"fluid/discrete = {fluid / discrete:.3f}"


def test_omega_identities():
    rng = np.random.default_rng(0)
    x = _inputs(rng.uniform(0.01, 1.1, 50), rng.uniform(0.001, 1.5, (50, 4)))
    for j in range(1, 5):
        assert np.all(omega_ij_fluid(x, j, j) == 1.0)
        for i in range(1, 5):
            assert np.allclose(omega_ij_fluid(x, i, j) * omega_ij_fluid(x, j, i), 1.0, rtol=1e-15)


def test_gamma0_decreasing():
    r = np.linspace(1e-3, 1.0, 500)
    g = gamma0_fluid(_inputs(r, np.ones((500, 0))))
    assert np.all(np.diff(g) < 0)


def test_no_relays_reduces_to_homogeneous():
    r = np.linspace(0.01, 1.1, 40)
    x = _inputs(r, np.empty((40, 0)))
    assert np.allclose(sinr_enb_fluid(x), gamma0_fluid(x) / (1 + i2_fluid(x)), rtol=1e-15)


@given(r=st.floats(0.002, 1.9), ri=st.lists(st.floats(0.002, 1.9), min_size=1, max_size=6),
       shift=st.floats(-20, 20))
@settings(max_examples=60, deadline=None)
def test_power_scaling_invariance(r, ri, shift):
    p = PropagationParams()
    a = _inputs([r], [ri], p, 25.0)
    b = _inputs([r], [ri], p.scaled(shift), 25.0 + shift)
    assert sinr_enb_fluid(b)[0] == pytest.approx(sinr_enb_fluid(a)[0], rel=1e-12)
    for j in range(1, len(ri) + 1):
        assert sinr_relay_fluid(b, j)[0] == pytest.approx(sinr_relay_fluid(a, j)[0], rel=1e-12)


def test_enb_sinr_continuous():
    r = np.linspace(2e-3, 2 - 2e-3, 20001)
    ri = np.column_stack([np.full_like(r, 0.5), np.full_like(r, 0.8)])
    g = 10 * np.log10(sinr_enb_fluid(_inputs(r, ri)))
    g2 = 10 * np.log10(sinr_enb_fluid(_inputs(r + 1e-8, ri)))
    assert np.all(np.isfinite(g))
    assert np.max(np.abs(g2 - g)) < 1e-3


def test_domain_clamp():
    a = sinr_enb_fluid(_inputs([5.0], [[0.5]]))
    b = sinr_enb_fluid(_inputs([2 - 1e-3], [[0.5]]))
    assert np.isfinite(a[0]) and a[0] == pytest.approx(b[0])


def test_params_reject_nonconvergent_exponent():
    with pytest.raises(ValueError):
        PropagationParams(eta_R=2.0)


def test_relay_type_range():
    with pytest.raises(ValueError):
        sinr_relay_fluid(_inputs([0.5], [[0.3, 0.4]]), 3)


QUANTITIES = {
    "gamma0": (lambda x: gamma0_fluid(x), lambda t: t.gamma0),
    "gamma_ik": (lambda x: gamma_ik_fluid(x), lambda t: t.gamma_ik),
    "Omega_i": (lambda x: omega_i_fluid(x), lambda t: t.omega),
    "I2": (lambda x: i2_fluid(x), lambda t: t.I2),
    "Omega_ij": (lambda x: omega_ij_fluid(x, 1, 2), lambda t: t.omega_ij(1, 2)),
    "I3": (lambda x: i3_fluid(x, 1), lambda t: t.I3(1)),
}


@pytest.mark.parametrize("name", list(QUANTITIES))
def test_closed_form_vs_discrete_sum(name, grid10, params, uniform1k):
    lay = RelayLayout(3, 0.7, 0.0, 31)
    pts = uniform1k.positions
    t = exact_terms(pts, lay, grid10, params)
    ri, _ = nearest_distances(pts, lay, grid10)
    x = FluidInputs(np.hypot(*pts.T), ri, params, 1.0, grid10.density, 31.0)
    fl, ex = QUANTITIES[name]
    rel = np.abs(fl(x) / ex(t) - 1)
    assert np.all(rel <= 0.15), (f"{name}: median {np.median(rel):.3f}, p90 {np.quantile(rel, 0.9):.3f}, "
                                 f"max {rel.max():.3f}")


def test_fluid_field_shares_best_server_rule(grid10, params):
    s = sample_cell(grid10, 3000, "grid")
    f = fluid_field(s.positions, RelayLayout(3, 0.7, 0.0, 31), grid10, params)
    assert f.backend == "fluid"
    assert set(np.unique(f.server)) <= {-1, ENB, 1, 2, 3}
    assert np.all(f.gamma > 0)


def test_backhaul_fluid_decreasing(grid10, params):
    g = [sinr_backhaul_fluid(RR, params, grid10).gamma_B for RR in np.arange(0.1, 1.01, 0.1)]
    assert all(a > b for a, b in zip(g, g[1:]))
