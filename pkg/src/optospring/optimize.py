"""Noise minimization over design parameters, pointwise and over bands."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .core import FreeMass, FrequencyGrid, Oscillator, Susceptibility, \
    susceptibility_inverse
from .elements import epsilon
from .formulas import HybridParams

log = logging.getLogger(__name__)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# pointwise coupling optimum


@dataclass(frozen=True)
class PointwiseOptimum:
    ups_opt: float
    s_min: float
    degenerate: bool


def optimal_upsilon_pointwise(chi: Susceptibility, varkappa: float, eta: float,
                              omega: float) -> PointwiseOptimum:
    """Coupling minimizing the lossy virtual-rigidity spectrum at one Omega.

    Upsilon_opt^2 = sqrt(|chi^-1 + vk|^2 + eps^2 |chi|^-2), with the minimum
    value equal to that same square root (the optimal bound).
    """
    if not (0.0 < eta <= 1.0):
        raise ValueError("eta must be in (0, 1]")
    chi_inv = float(susceptibility_inverse(chi, float(omega)))
    eps = epsilon(eta)
    radicand = (chi_inv + varkappa) ** 2 + (eps * chi_inv) ** 2
    if radicand == 0.0:
        return PointwiseOptimum(0.0, 0.0, True)
    s_min = math.sqrt(radicand)
    return PointwiseOptimum(radicand ** 0.25, s_min, False)


# ---------------------------------------------------------------------------
# band objectives


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   rel_tol: float = 1e-6, max_iter: int = 200
                   ) -> tuple[float, float]:
    """Deterministic golden-section minimization of a unimodal scalar f."""
    if hi < lo:
        lo, hi = hi, lo
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    scale = max(abs(lo), abs(hi), 1.0)
    for _ in range(max_iter):
        if abs(b - a) <= rel_tol * scale:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass
class BandObjective:
    """Weighted band average of a parameterized spectrum.

    ``spectrum(params, omegas)`` must return the per-point spectral density;
    non-finite points (degenerate resonances) are excluded from the average
    with a logged notice.
    """

    grid: FrequencyGrid
    spectrum: Callable[[Mapping[str, float], np.ndarray], np.ndarray]
    ranges: dict[str, tuple[float, float]]
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.ranges:
            raise ValueError("need at least one parameter range")
        for name, (lo, hi) in self.ranges.items():
            if not hi > lo:
                raise ValueError(f"empty range for {name!r}")
        n = len(self.grid)
        w = np.full(n, 1.0 / n) if self.weights is None \
            else np.asarray(self.weights, dtype=float)
        if w.shape != (n,) or np.any(w < 0.0) or w.sum() <= 0.0:
            raise ValueError("weights must be non-negative with positive sum")
        self.weights = w / w.sum()

    def evaluate(self, params: Mapping[str, float]) -> float:
        s = np.asarray(self.spectrum(params, self.grid.points), dtype=float)
        finite = np.isfinite(s)
        if not finite.any():
            bad = [f"omega={om:g}: S={v}" for om, v
                   in zip(self.grid.points, s)]
            raise ValueError("objective degenerate on the whole band:\n  "
                             + "\n  ".join(bad))
        if not finite.all():
            log.info("excluding %d degenerate grid points from band objective",
                     int((~finite).sum()))
        w = self.weights[finite]
        return float(np.dot(w / w.sum(), s[finite]))


def minimize_band(obj: BandObjective, sweeps: int = 3,
                  rel_tol: float = 1e-6) -> tuple[dict[str, float], float]:
    """Coordinate descent (golden section per coordinate) over the parameter
    ranges. Deterministic: identical configuration gives identical output."""
    params = {name: 0.5 * (lo + hi) for name, (lo, hi) in obj.ranges.items()}
    best = obj.evaluate(params)
    for _ in range(sweeps):
        for name, (lo, hi) in obj.ranges.items():
            def along(x: float, _name=name) -> float:
                trial = dict(params)
                trial[_name] = x
                try:
                    return obj.evaluate(trial)
                except ValueError:
                    return math.inf
            x, fx = golden_section(along, lo, hi, rel_tol=rel_tol)
            if fx <= best:
                params[name] = x
                best = fx
    return params, best


# ---------------------------------------------------------------------------
# matched hybrid designs


@dataclass(frozen=True)
class HybridDesign:
    """Matched hybrid parameters plus the physical realization of the
    auxiliary rigidity: (ups_s, angle) is (Upsilon_S, psi_S) for the real
    double-pass spring and (Upsilon_S, phi_S) for the virtual one."""

    params: HybridParams
    ups_s: float
    angle: float


def design_hybrid(omega_s: float, ups_i: float, mode: str, *, r: float = 0.0,
                  eta_i: float = 1.0, eta_s: float = 1.0) -> HybridDesign:
    """Matched design for a free-mass interferometer and a negative-mass
    spin oscillator at omega_s: k = omega_s^2 with effective auxiliary
    coupling equal to ups_i."""
    if omega_s < 0.0 or ups_i <= 0.0:
        raise ValueError("need omega_s >= 0 and ups_i > 0")
    k = omega_s * omega_s
    params = HybridParams(ups_i=ups_i, r=r, eps_i=epsilon(eta_i),
                          eps_s=epsilon(eta_s), chi_i=FreeMass(),
                          chi_s=Oscillator(k, mass_sign=-1), k=k, mode=mode)
    u2 = ups_i * ups_i
    if mode == "real":
        angle = math.atan2(2.0 * k, u2)
        ups_s = ups_i / (2.0 * math.cos(angle))
    else:
        angle = math.atan2(k, u2)
        ups_s = ups_i / math.cos(angle)
    return HybridDesign(params, ups_s, angle)
