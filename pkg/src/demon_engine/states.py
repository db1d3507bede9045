"""Gibbs states of the two qubits and their energies.

Each qubit has energy 0 in ``|0>`` and ``gap`` in ``|1>``. Units are natural
(hbar = k_B = 1); any consistent energy unit works as long as temperatures are
given as ``k_B * T`` in the same unit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmat import frozen, partial_trace

T_MIN = 1e-9
EXPONENT_CLAMP = 700.0


@dataclass(frozen=True)
class QubitParams:
    """Level spacing and bath temperature of one qubit."""

    gap: float
    temperature: float

    def __post_init__(self):
        if not (math.isfinite(self.gap) and self.gap > 0):
            raise ValueError(f"gap must be finite and > 0, got {self.gap}")
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(f"temperature must be finite and > 0, got {self.temperature}")

    @property
    def beta_gap(self) -> float:
        return self.gap / self.temperature


def boltzmann_factor(q: QubitParams) -> float:
    """``exp(-gap/T)``; exactly 0 at or below ``T_MIN``."""
    if q.temperature <= T_MIN:
        return 0.0
    x = q.gap / q.temperature
    if not math.isfinite(x):
        raise ValueError(f"non-finite exponent gap/T = {x}")
    return math.exp(-min(x, EXPONENT_CLAMP))


def gibbs_populations(q: QubitParams) -> tuple[float, float]:
    """Ground and excited populations ``(p0, p1)`` at the bath temperature."""
    a = boltzmann_factor(q)
    p1 = a / (1.0 + a)
    return 1.0 - p1, p1


def partition_function(q: QubitParams) -> float:
    return 1.0 + boltzmann_factor(q)


@dataclass(frozen=True)
class JointThermalState:
    """Product Gibbs state of S and D.

    ``p[qs, qd]`` is the joint probability of ``|qs, qd>``; ``rho`` is the
    matching diagonal 4x4 matrix.
    """

    rho: np.ndarray
    p: np.ndarray
    z_s: float
    z_d: float

    def prob(self, qs: int, qd: int) -> float:
        return float(self.p[qs, qd])


def joint_thermal_state(s: QubitParams, d: QubitParams) -> JointThermalState:
    ps = np.array(gibbs_populations(s))
    pd = np.array(gibbs_populations(d))
    p = np.outer(ps, pd)
    p.flags.writeable = False
    rho = frozen(np.diag(p.reshape(4)))
    return JointThermalState(rho=rho, p=p, z_s=partition_function(s), z_d=partition_function(d))


def excited_population(rho, which: str) -> float:
    return float(partial_trace(rho, which)[1, 1].real)


def energy(rho, s_gap: float, d_gap: float) -> tuple[float, float]:
    """Internal energies ``(E_S, E_D)`` of the reduced states."""
    return s_gap * excited_population(rho, "S"), d_gap * excited_population(rho, "D")


def basis_projector(qs: int, qd: int) -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    rho[2 * qs + qd, 2 * qs + qd] = 1.0
    return rho


def bell_state() -> np.ndarray:
    """Projector onto ``(|0,0> + |1,1>)/sqrt(2)``."""
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / math.sqrt(2)
    return np.outer(psi, psi.conj())
