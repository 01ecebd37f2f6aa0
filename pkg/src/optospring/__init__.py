"""Quantum noise budgets for linear optomechanical force sensors with
double-pass optical springs, virtual rigidity and entangled hybrid readout."""

from .core import (Carrier, FreeMass, FrequencyGrid, Oscillator,
                   QuadratureVector, Shifted, Susceptibility,
                   classical_quadratures, rotate, susceptibility_inverse)
from .elements import (CarrierPhaseShift, Loss, OMCoupling, QuantumPhaseShift,
                       TwoModeSqueezed, Vacuum, coupling_cavity,
                       coupling_free_mirror, coupling_spin, epsilon)
from .network import (Chain, HybridSystem, ReadoutDecomposition,
                      combine_optimal, cross_spectrum, double_pass_chain,
                      extract_spring, hybrid_system, position_meter_chain,
                      solve_chain, sum_noise_spectrum)

__version__ = "0.1.0"
