"""Acceptance gate: one test (and one printed pass/fail line) per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import math

import numpy as np
import pytest

from optospring.cli import BUDGET_COLUMNS, main, run_verify
from optospring.core import FreeMass, Oscillator, susceptibility_inverse
from optospring.elements import epsilon
from optospring.formulas import (HybridParams, hybrid_component_spectra,
                                 hybrid_full_spectrum, hybrid_approx_spectrum,
                                 hybrid_lowfreq_spectrum,
                                 lossy_real_spectrum,
                                 lossy_virtual_spectrum_eff,
                                 matching_condition, optimal_lossy_bound,
                                 position_meter_spectrum, sql)
from optospring.network import double_pass_chain, extract_spring
from optospring.optimize import optimal_upsilon_pointwise

OMEGAS = np.geomspace(0.1, 10.0, 30)


def report(n, desc, ok=True):
    line = f"criterion {n:2d}: {desc:55s} {'PASS' if ok else 'FAIL'}"
    print(line)
    assert ok, line


def test_criterion_01_oracle_equivalence():
    _, errs, ok = run_verify(seed=42, samples=100, tol=1e-9)
    assert max(errs.values()) <= 1e-9
    report(1, "closed forms vs network oracle <= 1e-9", ok)


def test_criterion_02_emergent_spring():
    rng = np.random.default_rng(2)
    for _ in range(50):
        ups = rng.uniform(0.1, 10.0)
        psi = rng.uniform(-1.4, 1.4)
        got = extract_spring(double_pass_chain(ups, psi, FreeMass()))
        assert got == pytest.approx(ups ** 2 * math.sin(2 * psi), rel=1e-12)
    for psi in (0.0, math.pi / 2):
        assert extract_spring(double_pass_chain(2.0, psi, FreeMass())) == 0.0
    report(2, "emergent spring = Ups^2 sin(2 psi), zero at 0 and pi/2")


def test_criterion_03_sql_attainment():
    factors = np.geomspace(1 / math.sqrt(2), math.sqrt(2), 30001)
    for mech in (FreeMass(), Oscillator(2.0)):
        s_sql = sql(mech, OMEGAS)
        for omega, target in zip(OMEGAS, np.atleast_1d(s_sql)):
            if target == 0.0:
                continue
            ups_grid = math.sqrt(target) * factors
            dense_min = min(position_meter_spectrum(u, mech, omega)
                            for u in ups_grid)
            assert (dense_min - target) / target < 1e-9
            analytic = position_meter_spectrum(math.sqrt(target), mech, omega)
            assert analytic == pytest.approx(target, rel=1e-12)
    report(3, "position meter attains the SQL at Ups^2 = |chi^-1|")


def test_criterion_04_loss_bound_saturation():
    eta = 0.8
    for mech in (FreeMass(), Oscillator(3.0)):
        for omega in OMEGAS:
            vk = -float(susceptibility_inverse(mech, omega))
            bound = optimal_lossy_bound(mech, vk, eta, omega)
            want = epsilon(eta) * sql(mech, omega)
            assert bound == pytest.approx(want, rel=1e-12, abs=1e-15)
            opt = optimal_upsilon_pointwise(mech, vk, eta, omega)
            if not opt.degenerate:
                s = lossy_virtual_spectrum_eff(opt.ups_opt, vk, eta, mech,
                                               omega)
                assert s == pytest.approx(bound, rel=1e-12)
    rng = np.random.default_rng(4)
    ups_grid = np.geomspace(1e-2, 1e2, 4001)
    for _ in range(50):
        mech = Oscillator(rng.uniform(0.3, 3.0) ** 2) if rng.integers(2) \
            else FreeMass()
        vk = rng.uniform(-10.0, 10.0)
        eta = rng.uniform(0.5, 1.0)
        omega = rng.uniform(0.2, 5.0)
        bound = optimal_lossy_bound(mech, vk, eta, omega)
        for u in ups_grid:
            assert lossy_virtual_spectrum_eff(u, vk, eta, mech, omega) \
                >= bound * (1 - 1e-12)
    report(4, "virtual-rigidity loss bound eps*S_SQL is saturated, never beaten")


def test_criterion_05_real_rigidity_cancellation():
    omega0, uk = 1.7, 0.9
    for eta in (1.0, 0.9, 0.7, 0.5, 0.23, 0.011):
        for mech in (FreeMass(), Oscillator(0.6)):
            kappa = -float(susceptibility_inverse(mech, omega0))
            s = lossy_real_spectrum(uk, kappa, eta, mech, omega0)
            assert s == pytest.approx(0.5 * uk ** 2, rel=1e-12)
    report(5, "real spring cancels shot and loss noise at the resonance")


def test_criterion_06_hybrid_entanglement_gain():
    for r in (0.0, 0.5, 1.0, 2.0):
        p = HybridParams(ups_i=1.3, r=r, eps_i=0.0, eps_s=0.0,
                         chi_i=FreeMass(), chi_s=Oscillator(4.0, -1),
                         k=4.0, mode="virtual")
        s_sum = hybrid_full_spectrum(p, OMEGAS)
        s_i0 = hybrid_component_spectra(p, OMEGAS)[0]
        np.testing.assert_allclose(s_sum * math.cosh(2 * r), s_i0, rtol=1e-10)
    report(6, "lossless matched hybrid: S_sum cosh(2r) = S_I0")


def test_criterion_07_loss_term_asymmetry():
    omega_s, omega = 10.0, 1.0
    args = (1.3, 0.7, 0.2)  # ups, r, eps_i
    virt = hybrid_lowfreq_spectrum(*args, 0.3, omega_s, "virtual", omega) \
        - hybrid_lowfreq_spectrum(*args, 0.0, omega_s, "virtual", omega)
    real = hybrid_lowfreq_spectrum(*args, 0.3, omega_s, "real", omega) \
        - hybrid_lowfreq_spectrum(*args, 0.0, omega_s, "real", omega)
    assert virt / real == pytest.approx((omega_s / omega) ** 4, rel=1e-12)
    report(7, "aux loss term: virtual/real = (Omega_S/Omega)^4 = 1e4")


def test_criterion_08_matched_determinant():
    chi_i, chi_s = FreeMass(), Oscillator(9.0, -1)
    res = matching_condition(chi_i, chi_s, OMEGAS)
    assert res.matched
    p = HybridParams(ups_i=1.1, r=1.0, eps_i=0.1, eps_s=0.2,
                     chi_i=chi_i, chi_s=chi_s, k=res.k, mode="virtual")
    s_i0, s_s0, s_si0, _, _ = hybrid_component_spectra(p, OMEGAS)
    det = s_i0 * s_s0 - s_si0 ** 2
    assert np.all(np.abs(det) <= 1e-12 * s_i0 ** 2)
    report(8, "matching zeroes the lossless channel determinant")


def test_criterion_09_approximation_audit():
    # exact difference: full - approx = -S_Sl (S_I0/ch + S_Sl) / (S_I0 ch + S_Sl),
    # i.e. bounded by the dropped aux-loss saturation terms
    rng = np.random.default_rng(9)
    for _ in range(50):
        eps_i = rng.uniform(0.0, 0.1)
        eps_s = rng.uniform(0.0, 0.1)
        omega_s = rng.uniform(1.0, 4.0)
        p = HybridParams(ups_i=rng.uniform(0.5, 3.0), r=rng.uniform(0.0, 2.0),
                         eps_i=eps_i, eps_s=eps_s, chi_i=FreeMass(),
                         chi_s=Oscillator(omega_s ** 2, -1), k=omega_s ** 2,
                         mode="virtual" if rng.integers(2) else "real")
        full = hybrid_full_spectrum(p, OMEGAS)
        approx = hybrid_approx_spectrum(p, OMEGAS)
        s_i0, _, _, _, s_sl = hybrid_component_spectra(p, OMEGAS)
        ch = math.cosh(2 * p.r)
        bound = s_sl * (s_i0 / ch + s_sl) / (s_i0 * ch)
        # the 1e-12*full slack absorbs cancellation noise when the two
        # ~O(1) spectra differ only in the last few digits
        assert np.all(np.abs(full - approx)
                      <= bound * (1 + 1e-9) + 1e-12 * full)
    report(9, "full vs approx hybrid differ only by the dropped loss terms")


def test_criterion_10_cli_contract(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("""
scheme = "real_rigidity"

[params]
upsilon = 1.3
psi = 0.4
eta = 0.9

[grid]
omega_min = 0.1
omega_max = 10.0
points = 100
""")
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        assert main(["budget", "--config", str(cfg), "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    lines = outputs[0].decode().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == ",".join(BUDGET_COLUMNS)
    assert len(lines) == 2 + 100
    report(10, "budget CSV: documented schema, 100 rows, byte-identical")
