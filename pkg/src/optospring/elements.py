"""Optical-chain building blocks and physical coupling-rate calculators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .core import SPEED_OF_LIGHT


# ---------------------------------------------------------------------------
# chain elements


@dataclass(frozen=True)
class OMCoupling:
    """One light-mechanics interaction with coupling rate upsilon (rad/s).

    The interaction imprints the mechanical position onto the quadrature
    orthogonal to the local carrier phase and kicks the mechanics with the
    quadrature along it (radiation pressure back action).
    """

    upsilon: float

    def __post_init__(self):
        if self.upsilon < 0.0:
            raise ValueError("upsilon must be >= 0")


@dataclass(frozen=True)
class CarrierPhaseShift:
    """Shifts the classical carrier phase by delta; quantum quadratures pass
    unchanged."""

    delta: float


@dataclass(frozen=True)
class QuantumPhaseShift:
    """Rotates the quantum quadratures by delta; the carrier is untouched.

    Not needed for the standard configurations (their inter-pass block acts
    on the carrier only), but lets setups that adjust the classical and
    quantum phases independently be expressed.
    """

    delta: float


@dataclass(frozen=True)
class Loss:
    """Beamsplitter loss with power transmissivity eta: the field is mixed
    with a fresh vacuum mode, d = sqrt(eta) b + sqrt(1-eta) g."""

    eta: float

    def __post_init__(self):
        if not (0.0 < self.eta <= 1.0):
            raise ValueError("eta must be in (0, 1]")


Element = Union[OMCoupling, CarrierPhaseShift, QuantumPhaseShift, Loss]


# ---------------------------------------------------------------------------
# input-field sources


@dataclass(frozen=True)
class Vacuum:
    """Ground-state input: quadrature spectral densities 1/2, no correlations."""


@dataclass(frozen=True)
class TwoModeSqueezed:
    """One arm of a two-mode squeezed (entangled) pair with parameter r.

    Each arm alone looks thermal with quadrature densities cosh(2r)/2; the
    cross densities between the arms are +sinh(2r)/2 (cosine) and
    -sinh(2r)/2 (sine).
    """

    r: float

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError("squeeze parameter r must be >= 0")


SourceSpec = Union[Vacuum, TwoModeSqueezed]


# ---------------------------------------------------------------------------
# coupling-rate calculators


def coupling_cavity(gamma: float, length: float, omega_o: float, power: float,
                    mass: float) -> float:
    """Coupling rate of a resonant cavity-assisted probe,
    Upsilon = (1 / (gamma L)) sqrt(8 omega_o I0 / m)."""
    _require_positive(gamma=gamma, length=length, omega_o=omega_o,
                      power=power, mass=mass)
    return math.sqrt(8.0 * omega_o * power / mass) / (gamma * length)


def coupling_free_mirror(omega_o: float, power: float, mass: float) -> float:
    """Coupling rate of a cavity-less single movable mirror,
    Upsilon = (1 / c) sqrt(8 omega_o I0 / m)."""
    _require_positive(omega_o=omega_o, power=power, mass=mass)
    return math.sqrt(8.0 * omega_o * power / mass) / SPEED_OF_LIGHT


def coupling_spin(gamma_s: float, omega_s: float, c0: float) -> float:
    """Coupling rate of a spin oscillator, c0 * sqrt(Gamma_S Omega_S).

    Only the proportionality to sqrt(Gamma_S Omega_S) is fixed by the
    physics; the prefactor c0 depends on the setup and must be supplied.
    """
    _require_positive(gamma_s=gamma_s, omega_s=omega_s, c0=c0)
    return c0 * math.sqrt(gamma_s * omega_s)


def epsilon(eta: float) -> float:
    """Loss factor eps = sqrt((1 - eta) / eta) for power transmissivity eta."""
    if not (0.0 < eta <= 1.0):
        raise ValueError("eta must be in (0, 1]")
    return math.sqrt((1.0 - eta) / eta)


def _require_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if value <= 0.0:
            raise ValueError(f"{name} must be > 0, got {value}")
