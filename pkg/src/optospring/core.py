"""Shared vocabulary: frequency grids, two-photon quadratures, mechanical
susceptibilities and classical carrier amplitudes.

Conventions used throughout the package:

* all rates are in rad/s; inverse susceptibilities and spring constants
  carry (rad/s)^2,
* quadrature spectral densities are dimensionless and double-sided, with
  vacuum value 1/2; force-normalized noise spectra therefore carry
  (rad/s)^2,
* susceptibilities are strictly real (no mechanical damping).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

HBAR = 1.054571817e-34  # J*s
SPEED_OF_LIGHT = 299792458.0  # m/s


# ---------------------------------------------------------------------------
# frequency grid


@dataclass(frozen=True)
class FrequencyGrid:
    """Ordered grid of sideband frequencies Omega (rad/s), positive and
    strictly increasing."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("frequency grid must be a non-empty 1-d array")
        if not np.all(pts > 0.0):
            raise ValueError("all grid frequencies must be positive")
        if not np.all(np.diff(pts) > 0.0):
            raise ValueError("grid frequencies must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @classmethod
    def log(cls, omega_min: float, omega_max: float, n: int) -> "FrequencyGrid":
        """Logarithmically spaced grid (the default: spectra span decades)."""
        if not (0.0 < omega_min < omega_max):
            raise ValueError("need 0 < omega_min < omega_max")
        return cls(np.geomspace(omega_min, omega_max, n))

    @classmethod
    def linear(cls, omega_min: float, omega_max: float, n: int) -> "FrequencyGrid":
        if not (0.0 < omega_min < omega_max):
            raise ValueError("need 0 < omega_min < omega_max")
        return cls(np.linspace(omega_min, omega_max, n))


# ---------------------------------------------------------------------------
# mechanical susceptibilities


@dataclass(frozen=True)
class FreeMass:
    """chi^-1(Omega) = -Omega^2."""


@dataclass(frozen=True)
class Oscillator:
    """Harmonic mode: chi^-1(Omega) = mass_sign * (omega0^2 - Omega^2).

    A negative-mass (spin) oscillator at Larmor frequency Omega_S is
    ``Oscillator(Omega_S**2, mass_sign=-1)``, giving chi^-1 = Omega^2 - Omega_S^2.
    """

    omega0_sq: float
    mass_sign: int = 1

    def __post_init__(self):
        if self.mass_sign not in (1, -1):
            raise ValueError("mass_sign must be +1 or -1")


@dataclass(frozen=True)
class Shifted:
    """Base susceptibility with an added spring: chi^-1 = base^-1 + spring."""

    base: "Susceptibility"
    spring: float


Susceptibility = Union[FreeMass, Oscillator, Shifted]


def susceptibility_inverse(s: Susceptibility, omega):
    """Real-valued chi^-1(Omega); accepts scalar or ndarray Omega."""
    if isinstance(s, FreeMass):
        return -np.square(omega)
    if isinstance(s, Oscillator):
        return s.mass_sign * (s.omega0_sq - np.square(omega))
    if isinstance(s, Shifted):
        return susceptibility_inverse(s.base, omega) + s.spring
    raise TypeError(f"not a susceptibility: {s!r}")


# ---------------------------------------------------------------------------
# two-photon quadratures and the classical carrier


@dataclass(frozen=True)
class QuadratureVector:
    """Cosine/sine quadrature amplitude pair."""

    c: complex
    s: complex


def rotate(v: QuadratureVector, theta: float) -> QuadratureVector:
    """Rotate a quadrature vector by theta (orthogonal, norm-preserving)."""
    co, si = math.cos(theta), math.sin(theta)
    return QuadratureVector(v.c * co - v.s * si, v.c * si + v.s * co)


@dataclass(frozen=True)
class Carrier:
    """Classical carrier: optical power, carrier frequency and phase."""

    power: float  # I0, W
    frequency: float  # omega_o, rad/s
    phase: float = 0.0  # phi, rad

    def __post_init__(self):
        if self.power < 0.0:
            raise ValueError("carrier power must be >= 0")
        if self.frequency <= 0.0:
            raise ValueError("carrier frequency must be > 0")


def classical_quadratures(carrier: Carrier) -> tuple[float, float]:
    """Mean quadrature amplitudes sqrt(2 I0 / (hbar omega_o)) (cos phi, sin phi)."""
    amp = math.sqrt(2.0 * carrier.power / (HBAR * carrier.frequency))
    return amp * math.cos(carrier.phase), amp * math.sin(carrier.phase)
