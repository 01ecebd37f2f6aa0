"""Closed-form noise spectral densities, coupling relations and bounds.

Every function here has a network-oracle counterpart; ``optospring.cli
verify`` (and the test suite) checks the two against each other on random
configurations. All spectra are two-sided and force normalized, in
(rad/s)^2; vacuum quadrature density is 1/2.

Degeneracies that a parameter sweep may legitimately traverse (zero signal
transfer at cos(phi) = 0, shifted-oscillator resonances) come back as inf
instead of raising.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Susceptibility, susceptibility_inverse
from .elements import epsilon


def _chi_inv_array(chi: Susceptibility, omega) -> np.ndarray:
    vals = susceptibility_inverse(chi, np.asarray(omega, dtype=float))
    return np.ascontiguousarray(np.atleast_1d(vals), dtype=np.float64)


def _match_shape(values: np.ndarray, omega):
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return float(values[0])
    return values


# ---------------------------------------------------------------------------
# single-channel forms


def _snap(x: float, tol: float = 1e-14) -> float:
    # trig of pi/2 etc. leaves ~1e-16 residue; treat it as an exact zero so
    # degenerate angles are flagged instead of producing 1e32-ish spectra
    return 0.0 if abs(x) <= tol else x


def sql(chi: Susceptibility, omega):
    """Force-normalized standard quantum limit S_SQL = |chi^-1(Omega)|."""
    return _match_shape(np.abs(_chi_inv_array(chi, omega)), omega)


def position_meter_spectrum(upsilon: float, chi: Susceptibility, omega):
    """Simple position meter: S = (|chi|^-2 / Upsilon^2 + Upsilon^2) / 2."""
    if upsilon <= 0.0:
        raise ValueError("upsilon must be > 0")
    s = _kernels.position_meter(_chi_inv_array(chi, omega), float(upsilon))
    return _match_shape(s, omega)


def double_pass_effective(upsilon: float, psi: float) -> tuple[float, float]:
    """Effective coupling and spring of the double pass:
    (Upsilon_kappa, kappa) = (2 Upsilon cos(psi), Upsilon^2 sin(2 psi))."""
    if upsilon < 0.0:
        raise ValueError("upsilon must be >= 0")
    return 2.0 * upsilon * _snap(math.cos(psi)), \
        upsilon * upsilon * _snap(math.sin(2.0 * psi))


def virtual_rigidity_params(upsilon: float, phi: float) -> tuple[float, float]:
    """Rotated-readout single pass: (Upsilon_varkappa, varkappa) =
    (Upsilon cos(phi), (Upsilon^2 / 2) sin(2 phi))."""
    if upsilon < 0.0:
        raise ValueError("upsilon must be >= 0")
    return upsilon * _snap(math.cos(phi)), \
        0.5 * upsilon * upsilon * _snap(math.sin(2.0 * phi))


def virtual_from_effective(ups_k: float, varkappa: float) -> tuple[float, float]:
    """Invert virtual_rigidity_params: the (Upsilon, phi) realizing a given
    effective coupling and virtual rigidity (varkappa = Upsilon_k^2 tan phi)."""
    if ups_k <= 0.0:
        raise ValueError("effective coupling must be > 0")
    phi = math.atan2(varkappa, ups_k * ups_k)
    return ups_k / math.cos(phi), phi


def lossy_virtual_spectrum(upsilon: float, phi: float, eta: float,
                           chi: Susceptibility, omega):
    """Virtual-rigidity meter with output loss eta.

    S = ( |chi^-1 + vk|^2 / Uk^2 + Uk^2 + eps^2 |chi|^-2 / Uk^2 ) / 2
    with Uk = Upsilon cos(phi), vk = (Upsilon^2 / 2) sin(2 phi). Degenerate
    (cos phi = 0) points come back as inf.
    """
    if upsilon <= 0.0:
        raise ValueError("upsilon must be > 0")
    ups_k, vk = virtual_rigidity_params(upsilon, phi)
    return lossy_virtual_spectrum_eff(ups_k, vk, eta, chi, omega)


def lossy_virtual_spectrum_eff(ups_k: float, varkappa: float, eta: float,
                               chi: Susceptibility, omega):
    """Same spectrum parameterized directly by (Upsilon_varkappa, varkappa)."""
    chi_inv = _chi_inv_array(chi, omega)
    if ups_k == 0.0:
        return _match_shape(np.full_like(chi_inv, np.inf), omega)
    s = _kernels.lossy_virtual(chi_inv, float(ups_k), float(varkappa),
                               epsilon(eta))
    return _match_shape(s, omega)


def lossy_real_spectrum(ups_k: float, kappa: float, eta: float,
                        chi: Susceptibility, omega):
    """Real-spring double pass with output loss eta:
    S = ( |chi^-1 + kappa|^2 (1 + eps^2) / Uk^2 + Uk^2 ) / 2.

    Shot noise and loss noise share the shifted susceptibility, so both
    cancel at the shifted resonance kappa = -chi^-1.
    """
    if ups_k <= 0.0:
        raise ValueError("effective coupling must be > 0")
    s = _kernels.lossy_real(_chi_inv_array(chi, omega), float(ups_k),
                            float(kappa), epsilon(eta))
    return _match_shape(s, omega)


def optimal_lossy_bound(chi: Susceptibility, varkappa: float, eta: float, omega):
    """Coupling-optimized sensitivity of the lossy virtual-rigidity meter:
    S_min = sqrt(|chi^-1 + vk|^2 + eps^2 |chi|^-2) >= eps * S_SQL."""
    s = _kernels.lossy_bound(_chi_inv_array(chi, omega), float(varkappa),
                             epsilon(eta))
    return _match_shape(s, omega)


# ---------------------------------------------------------------------------
# hybrid (entangled two-channel) forms


@dataclass(frozen=True)
class HybridParams:
    """Interferometer + auxiliary channel parameters.

    ``k`` is the rigidity applied to the auxiliary channel. In "real" mode
    the loss term sees the shifted susceptibility (k_loss = k); in
    "virtual" mode it sees the bare one (k_loss = 0).
    """

    ups_i: float
    r: float
    eps_i: float
    eps_s: float
    chi_i: Susceptibility
    chi_s: Susceptibility
    k: float
    mode: str = "virtual"

    def __post_init__(self):
        if self.ups_i <= 0.0:
            raise ValueError("ups_i must be > 0")
        if self.mode not in ("virtual", "real"):
            raise ValueError(f"mode must be 'virtual' or 'real', got {self.mode!r}")

    @property
    def k_loss(self) -> float:
        return self.k if self.mode == "real" else 0.0


def hybrid_component_spectra(p: HybridParams, omega):
    """Component spectra (S_I0, S_S0, S_SI0, S_I_loss, S_S_loss).

    S_SI0 uses the signed product -chi_I^-1 (chi_S^-1 + k): under matching
    (chi_S^-1 + k = -chi_I^-1) it equals S_I0, which is what makes the
    matched determinant S_I0 S_S0 - S_SI0^2 vanish.
    """
    chi_i_inv = _chi_inv_array(p.chi_i, omega)
    chi_s_inv = _chi_inv_array(p.chi_s, omega)
    u2 = p.ups_i * p.ups_i
    shifted = chi_s_inv + p.k
    shifted_loss = chi_s_inv + p.k_loss
    s_i0 = 0.5 * (chi_i_inv ** 2 / u2 + u2)
    s_s0 = 0.5 * (shifted ** 2 / u2 + u2)
    s_si0 = 0.5 * (u2 - chi_i_inv * shifted / u2)
    s_il = 0.5 * p.eps_i ** 2 * chi_i_inv ** 2 / u2
    s_sl = 0.5 * p.eps_s ** 2 * shifted_loss ** 2 / u2
    return tuple(_match_shape(s, omega) for s in (s_i0, s_s0, s_si0, s_il, s_sl))


def hybrid_full_spectrum(p: HybridParams, omega):
    """Exact optimally combined two-channel spectrum,
    S_sum = S_I - S_IS^2 / S_S with
    S_I = S_I0 cosh(2r) + S_I_loss, S_S = S_S0 cosh(2r) + S_S_loss,
    S_IS = S_SI0 sinh(2r)."""
    s = _kernels.hybrid_full(_chi_inv_array(p.chi_i, omega),
                             _chi_inv_array(p.chi_s, omega),
                             float(p.ups_i), float(p.k), float(p.k_loss),
                             float(p.eps_i), float(p.eps_s), float(p.r))
    return _match_shape(s, omega)


def hybrid_approx_spectrum(p: HybridParams, omega):
    """Small-loss matched approximation:
    S_sum ~= S_I0 / cosh(2r) + S_I_loss + S_S_loss, with the mode-dependent
    loss term written out through the susceptibilities."""
    s = _kernels.hybrid_approx(_chi_inv_array(p.chi_i, omega),
                               _chi_inv_array(p.chi_s, omega),
                               float(p.ups_i), float(p.eps_i), float(p.eps_s),
                               float(p.r), p.mode == "real")
    return _match_shape(s, omega)


def hybrid_lowfreq_spectrum(ups_i: float, r: float, eps_i: float, eps_s: float,
                            omega_s: float, mode: str, omega):
    """Low-frequency limit (Omega << Omega_S) for a free-mass interferometer
    and a negative-mass spin oscillator matched with k = Omega_S^2."""
    if mode not in ("virtual", "real"):
        raise ValueError(f"mode must be 'virtual' or 'real', got {mode!r}")
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(om >= omega_s / 3.0):
        warnings.warn("hybrid_lowfreq_spectrum used outside Omega < Omega_S/3",
                      stacklevel=2)
    u2 = ups_i * ups_i
    ch = math.cosh(2.0 * r)
    om4 = om ** 4
    base = 0.5 * (om4 / u2 + u2) / ch
    if mode == "virtual":
        loss = 0.5 * (eps_i ** 2 * om4 + eps_s ** 2 * omega_s ** 4) / u2
    else:
        loss = 0.5 * (eps_i ** 2 + eps_s ** 2) * om4 / u2
    return _match_shape(base + loss, omega)


@dataclass(frozen=True)
class MatchingResult:
    """Either a frequency-independent rigidity k or, if none exists on the
    band, the per-frequency residual profile."""

    k: float | None
    residual: np.ndarray | None = None

    @property
    def matched(self) -> bool:
        return self.k is not None


def matching_condition(chi_i: Susceptibility, chi_s: Susceptibility,
                       omegas, rtol: float = 1e-9) -> MatchingResult:
    """Rigidity k aligning the channels: chi_S^-1(Omega) + k = -chi_I^-1(Omega).

    For a free-mass interferometer and a negative-mass oscillator at
    Omega_S this gives k = Omega_S^2, frequency independent. If the profile
    is not constant on the band the residual is reported instead.
    """
    om = np.atleast_1d(np.asarray(omegas, dtype=float))
    profile = -(susceptibility_inverse(chi_i, om)
                + susceptibility_inverse(chi_s, om))
    k = float(np.median(profile))
    scale = max(1.0, float(np.max(np.abs(profile))))
    if np.max(np.abs(profile - k)) <= rtol * scale:
        return MatchingResult(k=k)
    return MatchingResult(k=None, residual=profile - k)
