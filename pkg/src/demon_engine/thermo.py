"""Bath occupation numbers and relaxation of each qubit towards its Gibbs state.

Each qubit relaxes independently through a generalized amplitude-damping
semigroup: its population difference decays at ``2*gamma`` and its transverse
components at ``gamma``. The joint map is the tensor product of the two
single-qubit maps, so joint coherences such as ``|0,0><1,1|`` decay at
``gamma_S + gamma_D``. The channel is applied exactly through its Pauli
transfer matrix.

Population difference is ``z = p1 - p0`` (excited minus ground), whose steady
value is ``-1/M`` with ``M = 1 + 2 n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmat import I2, PAULI_X, PAULI_Y, PAULI_Z, as_matrix, frozen, partial_trace
from .states import EXPONENT_CLAMP, T_MIN, QubitParams, energy, joint_thermal_state

_PAULIS = (I2, PAULI_X, PAULI_Y, PAULI_Z)
_JOINT_PAULIS = np.array([[np.kron(a, b) for b in _PAULIS] for a in _PAULIS])


@dataclass(frozen=True)
class BathParams:
    temperature: float
    damping_rate: float = 1.0

    def __post_init__(self):
        for name in ("temperature", "damping_rate"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")


def mean_occupation(t: float, omega: float) -> float:
    """Bose-Einstein occupation ``1/(exp(omega/t) - 1)``."""
    if not omega > 0:
        raise ValueError(f"mode energy must be > 0, got {omega}")
    if t <= T_MIN:
        return 0.0
    x = omega / t
    if x > EXPONENT_CLAMP:
        return 0.0
    return 1.0 / math.expm1(x)


def m_factor(t: float, omega: float) -> float:
    """``M = 1 + 2 n(t, omega)``."""
    return 1.0 + 2.0 * mean_occupation(t, omega)


def relax_sigma_z(z0: float, delta: float, bath: BathParams, t: float) -> float:
    """Population difference ``p1 - p0`` after relaxing for time ``t``."""
    if abs(z0) > 1.0 + 1e-12:
        raise ValueError(f"|z0| must be <= 1, got {z0}")
    if t < 0:
        raise ValueError("t must be >= 0")
    inv_m = 1.0 / m_factor(bath.temperature, delta)
    if t == 0:
        return z0
    return (z0 + inv_m) * math.exp(-2.0 * bath.damping_rate * t) - inv_m


def transfer_matrix(delta: float, bath: BathParams, t: float) -> np.ndarray:
    """Pauli transfer matrix of one qubit's relaxation, on coefficients (I, X, Y, Z)."""
    decay_pop = math.exp(-2.0 * bath.damping_rate * t)
    decay_coh = math.exp(-bath.damping_rate * t)
    # <PAULI_Z> = p0 - p1, so its steady value is +1/M.
    z_inf = 1.0 / m_factor(bath.temperature, delta)
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, decay_coh, 0.0, 0.0],
            [0.0, 0.0, decay_coh, 0.0],
            [(1.0 - decay_pop) * z_inf, 0.0, 0.0, decay_pop],
        ]
    )


def thermalize(rho, s_bath: BathParams, d_bath: BathParams, s_gap: float, d_gap: float,
               t: float) -> np.ndarray:
    """Evolve a joint state with the coupling off for time ``t`` (``inf`` = ideal)."""
    rho = as_matrix(rho, dims=(4,))
    if t < 0:
        raise ValueError("t must be >= 0")
    if math.isinf(t):
        return np.array(
            joint_thermal_state(
                QubitParams(s_gap, s_bath.temperature), QubitParams(d_gap, d_bath.temperature)
            ).rho
        )
    if t == 0:
        return rho.copy()
    coeffs = np.einsum("abij,ji->ab", _JOINT_PAULIS, rho)
    ts = transfer_matrix(s_gap, s_bath, t)
    td = transfer_matrix(d_gap, d_bath, t)
    coeffs = ts @ coeffs @ td.T
    out = 0.25 * np.einsum("ab,abij->ij", coeffs, _JOINT_PAULIS)
    return 0.5 * (out + out.conj().T)


def heat_exchanged(rho_before, rho_after, which: str, gap: float) -> float:
    """Signed heat for one qubit across a thermalization stroke.

    S: energy gained, ``E_S(after) - E_S(before)`` (heat absorbed).
    D: energy lost, ``E_D(before) - E_D(after)`` (heat released).
    """
    if which == "S":
        return energy(rho_after, gap, 0.0)[0] - energy(rho_before, gap, 0.0)[0]
    if which == "D":
        return energy(rho_before, 0.0, gap)[1] - energy(rho_after, 0.0, gap)[1]
    raise ValueError(f"unknown subsystem {which!r}")


def population_difference(rho, which: str) -> float:
    r = partial_trace(rho, which)
    return float((r[1, 1] - r[0, 0]).real)


def gibbs_target(s_gap, d_gap, s_bath: BathParams, d_bath: BathParams) -> np.ndarray:
    return frozen(
        joint_thermal_state(
            QubitParams(s_gap, s_bath.temperature), QubitParams(d_gap, d_bath.temperature)
        ).rho
    )
