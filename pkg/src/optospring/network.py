"""Brute-force linear network oracle.

A chain of optical elements is bound to one mechanical mode and read out by
a homodyne detector. The quantum quadratures are propagated symbolically in
the injected noises and in the mechanical position, the closed
radiation-pressure loop is solved per frequency, and the measured
quadrature is decomposed into a signal-transfer coefficient and noise
coefficients. Everything downstream (emergent spring constants, sum noise
spectra, cross spectra of entangled channels, Wiener-optimal combination)
falls out of that decomposition.

The propagation matrices are frequency independent in the bad-cavity
model; only the mechanical solve depends on Omega. The per-chain
propagation is therefore computed once and cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import Carrier, Susceptibility, susceptibility_inverse
from .elements import (CarrierPhaseShift, Element, Loss, OMCoupling,
                       QuantumPhaseShift, SourceSpec, TwoModeSqueezed, Vacuum)

# Relative threshold below which the closed-loop coefficient chi^-1 + kappa
# counts as vanished (resonance of the shifted oscillator).
DEGENERATE_RTOL = 1e-12

_DEFAULT_CARRIER = Carrier(power=0.0, frequency=1.77e15)


@dataclass(frozen=True)
class Chain:
    """Ordered element list bound to a mechanical mode and a homodyne readout.

    The measured quadrature is q = b_c cos(zeta) + b_s sin(zeta); the plain
    sine-quadrature readout corresponds to zeta = pi/2.
    """

    carrier: Carrier
    elements: tuple[Element, ...]
    mech: Susceptibility
    homodyne_angle: float = math.pi / 2
    source: SourceSpec = field(default_factory=Vacuum)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not any(isinstance(e, OMCoupling) for e in self.elements):
            raise ValueError("chain needs at least one OMCoupling element")


@dataclass(frozen=True)
class HybridSystem:
    """Two chains probed by the arms of one two-mode squeezed source.

    The chains must not share a mechanical mode; their sources must both be
    the entangled pair with the same r.
    """

    chain_i: Chain
    chain_s: Chain
    r: float

    def __post_init__(self):
        for ch in (self.chain_i, self.chain_s):
            if not isinstance(ch.source, TwoModeSqueezed) or ch.source.r != self.r:
                raise ValueError("hybrid chains must carry TwoModeSqueezed(r) sources")
        if self.chain_i.mech == self.chain_s.mech:
            raise ValueError("hybrid chains must not share a mechanical mode")


@dataclass(frozen=True)
class ReadoutDecomposition:
    """Per-frequency linear decomposition of the measured quadrature:
    output = signal_transfer * f + sum(noise_coeffs[label] * noise[label])."""

    omega: float
    signal_transfer: float
    noise_coeffs: dict[tuple, float]
    spring: float
    degenerate: bool

    def force_normalized(self) -> dict[tuple, float]:
        """Noise coefficients referred to the signal force (divided by t)."""
        if self.degenerate:
            raise ZeroDivisionError("degenerate solve: no finite signal transfer")
        return {k: v / self.signal_transfer for k, v in self.noise_coeffs.items()}


# ---------------------------------------------------------------------------
# symbolic propagation (frequency independent)


@lru_cache(maxsize=256)
def _propagate(chain: Chain):
    """Propagate unit noise inputs and the position coordinate through the
    element list.

    Returns (labels, q_in, q_x, force, spring): the measured quadrature is
    q_in . n + q_x * X, and the mechanical loop reads
    chi^-1 X = f + force . n - spring * X.
    """
    labels: list[tuple] = [("src", "c"), ("src", "s")]
    n_loss = sum(isinstance(e, Loss) for e in chain.elements)
    n_in = 2 + 2 * n_loss

    fld = np.zeros((2, n_in))  # field quadratures as rows over noise inputs
    fld[0, 0] = 1.0
    fld[1, 1] = 1.0
    fld_x = np.zeros(2)  # coefficient of X in the field quadratures
    force = np.zeros(n_in)
    force_x = 0.0
    phi = chain.carrier.phase
    next_in = 2
    loss_idx = 0

    for el in chain.elements:
        if isinstance(el, OMCoupling):
            co, si = math.cos(phi), math.sin(phi)
            # back action uses the field entering the coupling
            force += el.upsilon * (co * fld[0] + si * fld[1])
            force_x += el.upsilon * (co * fld_x[0] + si * fld_x[1])
            fld_x[0] -= el.upsilon * si
            fld_x[1] += el.upsilon * co
        elif isinstance(el, CarrierPhaseShift):
            phi += el.delta
        elif isinstance(el, QuantumPhaseShift):
            co, si = math.cos(el.delta), math.sin(el.delta)
            fld = np.array([co * fld[0] - si * fld[1], si * fld[0] + co * fld[1]])
            fld_x = np.array([co * fld_x[0] - si * fld_x[1],
                              si * fld_x[0] + co * fld_x[1]])
        elif isinstance(el, Loss):
            t = math.sqrt(el.eta)
            g = math.sqrt(1.0 - el.eta)
            fld = t * fld
            fld_x = t * fld_x
            fld[0, next_in] = g
            fld[1, next_in + 1] = g
            labels += [("loss", loss_idx, "c"), ("loss", loss_idx, "s")]
            next_in += 2
            loss_idx += 1
        else:
            raise TypeError(f"unknown element: {el!r}")

    zc, zs = math.cos(chain.homodyne_angle), math.sin(chain.homodyne_angle)
    q_in = zc * fld[0] + zs * fld[1]
    q_x = zc * fld_x[0] + zs * fld_x[1]
    spring = -force_x
    # snap roundoff-level transfer (e.g. cos(pi/2) ~ 6e-17) to an exact zero
    ups_scale = sum(e.upsilon for e in chain.elements
                    if isinstance(e, OMCoupling))
    if abs(q_x) <= 1e-14 * ups_scale:
        q_x = 0.0
    if abs(spring) <= 1e-14 * ups_scale * ups_scale:
        spring = 0.0
    return tuple(labels), q_in, q_x, force, spring


def extract_spring(chain: Chain) -> float:
    """Emergent spring constant kappa: the coefficient of -X in the total
    radiation-pressure force of the closed loop."""
    return _propagate(chain)[4]


def _loop_coefficient(chain: Chain, omega):
    """chi^-1 + kappa and its degeneracy mask, vectorized over omega."""
    spring = _propagate(chain)[4]
    chi_inv = np.asarray(susceptibility_inverse(chain.mech, omega), dtype=float)
    chi_eff = chi_inv + spring
    scale = np.maximum(np.abs(chi_inv), abs(spring))
    degenerate = np.abs(chi_eff) <= DEGENERATE_RTOL * scale
    return chi_eff, degenerate


def solve_chain(chain: Chain, omega: float) -> ReadoutDecomposition:
    """Solve the closed radiation-pressure loop at one frequency."""
    labels, q_in, q_x, force, spring = _propagate(chain)
    chi_eff, degenerate = _loop_coefficient(chain, float(omega))
    chi_eff = float(chi_eff)
    if q_x == 0.0:
        # no signal reaches the readout quadrature at all
        return ReadoutDecomposition(float(omega), 0.0,
                                    dict(zip(labels, q_in)), spring, True)
    if bool(degenerate):
        return ReadoutDecomposition(float(omega), math.inf,
                                    dict(zip(labels, q_in)), spring, True)
    t = q_x / chi_eff
    coeffs = q_in + t * force
    return ReadoutDecomposition(float(omega), t, dict(zip(labels, coeffs)),
                                spring, False)


# ---------------------------------------------------------------------------
# spectra


def _input_variances(chain: Chain, n_in: int) -> np.ndarray:
    """Diagonal of the input covariance (each loss injects plain vacuum)."""
    var = np.full(n_in, 0.5)
    if isinstance(chain.source, TwoModeSqueezed):
        var[0] = var[1] = 0.5 * math.cosh(2.0 * chain.source.r)
    return var


def _force_normalized_rows(chain: Chain, omega):
    """Force-normalized noise coefficient rows over a frequency array.

    Returns (labels, rows, degenerate) with rows shaped (n_inputs, n_omega).
    The rows are linear in the loop coefficient: v = q_in * chi_eff / q_x + force.
    """
    labels, q_in, q_x, force, _ = _propagate(chain)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    chi_eff, degenerate = _loop_coefficient(chain, omega)
    if q_x == 0.0:
        rows = np.full((len(labels), omega.size), np.nan)
        return labels, rows, np.ones(omega.size, dtype=bool)
    rows = np.outer(q_in / q_x, chi_eff) + force[:, None]
    return labels, rows, degenerate


def sum_noise_spectrum(chain: Chain, omega):
    """Force-normalized sum noise spectral density; scalar or array omega.

    Degenerate frequencies (vanishing loop coefficient or zero signal
    transfer) yield inf.
    """
    labels, rows, degenerate = _force_normalized_rows(chain, omega)
    var = _input_variances(chain, len(labels))
    s = np.einsum("i,ij,ij->j", var, rows, rows)
    s = np.where(degenerate | ~np.isfinite(s), np.inf, s)
    return s[0] if np.isscalar(omega) or np.ndim(omega) == 0 else s


def cross_spectrum(hybrid: HybridSystem, omega):
    """Auto- and cross-spectra (S_I, S_S, S_IS) of the two measured outputs,
    each force-normalized to its own channel."""
    scalar = np.isscalar(omega) or np.ndim(omega) == 0
    lab_i, rows_i, deg_i = _force_normalized_rows(hybrid.chain_i, omega)
    lab_s, rows_s, deg_s = _force_normalized_rows(hybrid.chain_s, omega)
    var_i = _input_variances(hybrid.chain_i, len(lab_i))
    var_s = _input_variances(hybrid.chain_s, len(lab_s))

    s_i = np.einsum("i,ij,ij->j", var_i, rows_i, rows_i)
    s_s = np.einsum("i,ij,ij->j", var_s, rows_s, rows_s)
    # only the source quadratures are cross-correlated between the arms:
    # S^c_IS = +sinh(2r)/2, S^s_IS = -sinh(2r)/2
    sh = 0.5 * math.sinh(2.0 * hybrid.r)
    s_is = sh * (rows_i[0] * rows_s[0] - rows_i[1] * rows_s[1])

    bad = deg_i | deg_s
    s_i = np.where(deg_i, np.inf, s_i)
    s_s = np.where(deg_s, np.inf, s_s)
    s_is = np.where(bad, np.inf, s_is)
    if scalar:
        return float(s_i[0]), float(s_s[0]), float(s_is[0])
    return s_i, s_s, s_is


def combine_optimal(s_i, s_s, s_is):
    """Wiener-optimal linear combination of the two channels:
    S_sum = S_I - S_IS^2 / S_S. Degenerate (S_S <= 0 or non-finite inputs)
    points come back as inf."""
    s_i = np.asarray(s_i, dtype=float)
    s_s = np.asarray(s_s, dtype=float)
    s_is = np.asarray(s_is, dtype=float)
    finite = np.isfinite(s_i) & np.isfinite(s_s) & np.isfinite(s_is) & (s_s > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(finite, s_i - s_is * s_is / np.where(finite, s_s, 1.0), np.inf)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# standard configurations


def position_meter_chain(upsilon: float, mech: Susceptibility, *,
                         phi: float = 0.0, eta: float = 1.0,
                         homodyne_angle: float = math.pi / 2,
                         source: SourceSpec | None = None) -> Chain:
    """Single-pass probe at carrier phase phi with an output loss.

    phi = 0 is the simple position meter; phi != 0 realizes the virtual
    rigidity varkappa = (Upsilon^2 / 2) sin(2 phi).
    """
    elements: list[Element] = [OMCoupling(upsilon)]
    if eta < 1.0:
        elements.append(Loss(eta))
    carrier = Carrier(_DEFAULT_CARRIER.power, _DEFAULT_CARRIER.frequency, phi)
    return Chain(carrier, tuple(elements), mech, homodyne_angle,
                 source if source is not None else Vacuum())


def double_pass_chain(upsilon: float, psi: float, mech: Susceptibility, *,
                      phi: float = 0.0, eta: float = 1.0,
                      homodyne_angle: float = math.pi / 2,
                      source: SourceSpec | None = None) -> Chain:
    """Two interactions with carrier phases phi +/- psi.

    The inter-pass block shifts the carrier by -2 psi, producing the real
    optical spring kappa = Upsilon^2 sin(2 psi) with effective coupling
    Upsilon_kappa = 2 Upsilon cos(psi).
    """
    elements: list[Element] = [OMCoupling(upsilon), CarrierPhaseShift(-2.0 * psi),
                               OMCoupling(upsilon)]
    if eta < 1.0:
        elements.append(Loss(eta))
    carrier = Carrier(_DEFAULT_CARRIER.power, _DEFAULT_CARRIER.frequency, phi + psi)
    return Chain(carrier, tuple(elements), mech, homodyne_angle,
                 source if source is not None else Vacuum())


def hybrid_system(ups_i: float, r: float, eta_i: float, eta_s: float,
                  mech_i: Susceptibility, mech_s: Susceptibility,
                  k: float, mode: str) -> HybridSystem:
    """Interferometer + auxiliary channel probed by an entangled pair.

    The auxiliary chain realizes the applied rigidity k with effective
    coupling equal to ups_i, either as virtual rigidity (rotated readout
    phase, single pass) or as the real double-pass spring.
    """
    src = TwoModeSqueezed(r)
    chain_i = position_meter_chain(ups_i, mech_i, eta=eta_i, source=src)
    if mode == "virtual":
        phi_s = math.atan2(k, ups_i * ups_i)
        ups_s = ups_i / math.cos(phi_s)
        chain_s = position_meter_chain(ups_s, mech_s, phi=phi_s, eta=eta_s,
                                       source=src)
    elif mode == "real":
        psi_s = math.atan2(2.0 * k, ups_i * ups_i)
        ups_s = ups_i / (2.0 * math.cos(psi_s))
        chain_s = double_pass_chain(ups_s, psi_s, mech_s, eta=eta_s, source=src)
    else:
        raise ValueError(f"mode must be 'virtual' or 'real', got {mode!r}")
    return HybridSystem(chain_i, chain_s, r)
