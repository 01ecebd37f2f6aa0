import math

import numpy as np
import pytest

from optospring.core import FreeMass, FrequencyGrid, Oscillator
from optospring.elements import epsilon
from optospring.formulas import (double_pass_effective, hybrid_component_spectra,
                                 lossy_real_spectrum,
                                 lossy_virtual_spectrum_eff,
                                 optimal_lossy_bound, sql,
                                 virtual_rigidity_params)
from optospring.optimize import (BandObjective, design_hybrid, golden_section,
                                 minimize_band, optimal_upsilon_pointwise)


class TestGoldenSection:
    def test_quadratic(self):
        x, fx = golden_section(lambda x: (x - 2.0) ** 2 + 3.0, 0.0, 5.0)
        assert x == pytest.approx(2.0, abs=1e-5)
        assert fx == pytest.approx(3.0, abs=1e-9)

    def test_swapped_bounds(self):
        x, _ = golden_section(lambda x: (x - 2.0) ** 2, 5.0, 0.0)
        assert x == pytest.approx(2.0, abs=1e-5)

    def test_boundary_minimum(self):
        x, _ = golden_section(lambda x: x, 1.0, 4.0)
        assert x == pytest.approx(1.0, abs=1e-5)

    def test_matches_dense_grid(self):
        def f(x):
            return math.cosh(x - 0.7) + 0.1 * x * x

        xs = np.linspace(-3.0, 3.0, 2_000_001)
        dense = min(f(x) for x in xs)
        _, fx = golden_section(f, -3.0, 3.0, rel_tol=1e-9)
        assert fx == pytest.approx(dense, rel=1e-12)


class TestOptimalUpsilonPointwise:
    def test_lossless_free_mass(self):
        omega = 1.7
        opt = optimal_upsilon_pointwise(FreeMass(), 0.0, 1.0, omega)
        assert not opt.degenerate
        assert opt.ups_opt == pytest.approx(omega, rel=1e-12)
        assert opt.s_min == pytest.approx(sql(FreeMass(), omega), rel=1e-12)

    def test_cancelling_rigidity_leaves_loss_floor(self):
        omega, eta = 1.3, 0.8
        vk = omega ** 2
        opt = optimal_upsilon_pointwise(FreeMass(), vk, eta, omega)
        assert opt.s_min == pytest.approx(
            epsilon(eta) * sql(FreeMass(), omega), rel=1e-12)

    def test_spectrum_at_optimum_attains_minimum(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            omega = rng.uniform(0.2, 5.0)
            vk = rng.uniform(-10.0, 10.0)
            eta = rng.uniform(0.5, 1.0)
            opt = optimal_upsilon_pointwise(FreeMass(), vk, eta, omega)
            if opt.degenerate:
                continue
            s = lossy_virtual_spectrum_eff(opt.ups_opt, vk, eta,
                                           FreeMass(), omega)
            assert s == pytest.approx(opt.s_min, rel=1e-12)
            assert opt.s_min == pytest.approx(
                optimal_lossy_bound(FreeMass(), vk, eta, omega), rel=1e-12)

    def test_never_beaten_on_dense_coupling_grid(self):
        omega, vk, eta = 1.0, 0.4, 0.7
        opt = optimal_upsilon_pointwise(FreeMass(), vk, eta, omega)
        for uk in np.geomspace(opt.ups_opt / 10, opt.ups_opt * 10, 5001):
            assert lossy_virtual_spectrum_eff(uk, vk, eta, FreeMass(), omega) \
                >= opt.s_min * (1 - 1e-12)

    def test_local_minimality(self):
        omega, vk, eta = 2.1, -1.5, 0.9
        opt = optimal_upsilon_pointwise(FreeMass(), vk, eta, omega)
        for factor in (0.99, 1.01):
            assert lossy_virtual_spectrum_eff(opt.ups_opt * factor, vk, eta,
                                              FreeMass(), omega) > opt.s_min

    def test_degenerate_at_cancelled_resonance(self):
        opt = optimal_upsilon_pointwise(Oscillator(4.0), 0.0, 1.0, 2.0)
        assert opt.degenerate
        assert opt.ups_opt == 0.0
        assert opt.s_min == 0.0

    def test_rejects_bad_eta(self):
        with pytest.raises(ValueError):
            optimal_upsilon_pointwise(FreeMass(), 0.0, 0.0, 1.0)


def _single_point_grid(omega):
    # FrequencyGrid wants >= 2 points? use a tight pair around omega if so
    try:
        return FrequencyGrid(np.array([omega]))
    except ValueError:  # pragma: no cover
        return FrequencyGrid(np.array([omega, omega * (1 + 1e-12)]))


class TestBandObjective:
    def test_uniform_weights_average(self):
        grid = FrequencyGrid(np.array([1.0, 2.0, 3.0]))
        obj = BandObjective(grid, lambda p, om: p["a"] * om,
                            {"a": (0.0, 1.0)})
        assert obj.evaluate({"a": 3.0}) == pytest.approx(6.0)

    def test_custom_weights(self):
        grid = FrequencyGrid(np.array([1.0, 2.0]))
        obj = BandObjective(grid, lambda p, om: om ** 2, {"a": (0.0, 1.0)},
                            weights=np.array([3.0, 1.0]))
        assert obj.evaluate({}) == pytest.approx((3 * 1.0 + 1 * 4.0) / 4.0)

    def test_degenerate_points_excluded(self):
        grid = FrequencyGrid(np.array([1.0, 2.0, 3.0]))

        def spectrum(p, om):
            s = np.asarray(om, dtype=float).copy()
            s[s == 2.0] = np.inf
            return s

        obj = BandObjective(grid, spectrum, {"a": (0.0, 1.0)})
        assert obj.evaluate({}) == pytest.approx(2.0)

    def test_all_degenerate_raises(self):
        grid = FrequencyGrid(np.array([1.0, 2.0]))
        obj = BandObjective(grid, lambda p, om: np.full_like(om, np.inf),
                            {"a": (0.0, 1.0)})
        with pytest.raises(ValueError):
            obj.evaluate({})

    def test_validation(self):
        grid = FrequencyGrid(np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            BandObjective(grid, lambda p, om: om, {})
        with pytest.raises(ValueError):
            BandObjective(grid, lambda p, om: om, {"a": (1.0, 1.0)})
        with pytest.raises(ValueError):
            BandObjective(grid, lambda p, om: om, {"a": (0.0, 1.0)},
                          weights=np.array([-1.0, 2.0]))


class TestMinimizeBand:
    def test_single_param_matches_pointwise(self):
        omega, vk, eta = 1.4, 0.6, 0.8
        grid = _single_point_grid(omega)
        obj = BandObjective(
            grid,
            lambda p, om: lossy_virtual_spectrum_eff(p["ups"], vk, eta,
                                                     FreeMass(), om),
            {"ups": (0.1, 10.0)})
        params, best = minimize_band(obj)
        want = optimal_upsilon_pointwise(FreeMass(), vk, eta, omega)
        assert params["ups"] == pytest.approx(want.ups_opt, rel=1e-4)
        assert best == pytest.approx(want.s_min, rel=1e-8)

    def test_deterministic(self):
        grid = FrequencyGrid.log(0.5, 2.0, 11)
        def make():
            obj = BandObjective(
                grid,
                lambda p, om: lossy_virtual_spectrum_eff(p["ups"], p["vk"],
                                                         0.9, FreeMass(), om),
                {"ups": (0.1, 5.0), "vk": (-2.0, 2.0)})
            return minimize_band(obj)

        p1, b1 = make()
        p2, b2 = make()
        assert p1 == p2
        assert b1 == b2

    def test_never_above_dense_grid(self):
        grid = FrequencyGrid.log(0.5, 2.0, 11)
        obj = BandObjective(
            grid,
            lambda p, om: lossy_virtual_spectrum_eff(p["ups"], 0.3, 0.85,
                                                     FreeMass(), om),
            {"ups": (0.1, 5.0)})
        _, best = minimize_band(obj)
        dense = min(obj.evaluate({"ups": u})
                    for u in np.geomspace(0.1, 5.0, 20001))
        assert best <= dense * (1 + 1e-6)

    def test_spring_angle_cancels_susceptibility(self):
        # at fixed effective coupling the double-pass spring follows
        # kappa = (Uk^2 / 2) tan(psi); the single-frequency optimum puts the
        # shifted resonance on the measurement frequency, kappa = Omega0^2
        omega0, uk = 1.0, 1.5
        grid = _single_point_grid(omega0)
        obj = BandObjective(
            grid,
            lambda p, om: lossy_real_spectrum(
                uk, 0.5 * uk ** 2 * math.tan(p["psi"]), 0.8, FreeMass(), om),
            {"psi": (0.0, 1.4)})
        params, best = minimize_band(obj)
        kappa = 0.5 * uk ** 2 * math.tan(params["psi"])
        assert kappa == pytest.approx(omega0 ** 2, abs=1e-4)
        assert best == pytest.approx(0.5 * uk ** 2, rel=1e-6)


class TestDesignHybrid:
    @pytest.mark.parametrize("omega_s,ups_i", [(0.5, 0.7), (2.0, 1.3),
                                               (4.0, 0.4)])
    def test_real_round_trip(self, omega_s, ups_i):
        d = design_hybrid(omega_s, ups_i, "real")
        uk, kappa = double_pass_effective(d.ups_s, d.angle)
        assert uk == pytest.approx(ups_i, rel=1e-12)
        assert kappa == pytest.approx(omega_s ** 2, rel=1e-12)

    @pytest.mark.parametrize("omega_s,ups_i", [(0.5, 0.7), (2.0, 1.3),
                                               (4.0, 0.4)])
    def test_virtual_round_trip(self, omega_s, ups_i):
        d = design_hybrid(omega_s, ups_i, "virtual")
        uk, vk = virtual_rigidity_params(d.ups_s, d.angle)
        assert uk == pytest.approx(ups_i, rel=1e-12)
        assert vk == pytest.approx(omega_s ** 2, rel=1e-12)

    def test_zero_spin_frequency_limits(self):
        d = design_hybrid(0.0, 1.2, "real")
        assert d.angle == pytest.approx(0.0, abs=1e-15)
        assert d.ups_s == pytest.approx(0.6, rel=1e-12)
        d = design_hybrid(0.0, 1.2, "virtual")
        assert d.angle == pytest.approx(0.0, abs=1e-15)
        assert d.ups_s == pytest.approx(1.2, rel=1e-12)

    def test_quarter_angle_point(self):
        # ups_i^2 = 2 omega_s^2 puts the double pass at psi = pi/4
        omega_s = 1.0
        ups_i = math.sqrt(2.0)
        d = design_hybrid(omega_s, ups_i, "real")
        assert d.angle == pytest.approx(math.pi / 4, rel=1e-12)
        assert d.ups_s == pytest.approx(ups_i / math.sqrt(2.0), rel=1e-12)

    def test_design_is_matched(self):
        d = design_hybrid(2.0, 1.1, "virtual", r=1.0)
        om = np.geomspace(0.1, 10.0, 17)
        s_i0, s_s0, s_si0, _, _ = hybrid_component_spectra(d.params, om)
        np.testing.assert_allclose(s_s0, s_i0, rtol=1e-12)
        np.testing.assert_allclose(s_si0, s_i0, rtol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            design_hybrid(-1.0, 1.0, "real")
        with pytest.raises(ValueError):
            design_hybrid(1.0, 0.0, "real")
