"""Shared random-config sampling for property and acceptance tests."""
import math

import numpy as np

from demon_engine.engine import CycleConfig
from demon_engine.states import QubitParams


# Configs with |gap_S/T_S - gap_D/T_D| below this sit on the Q_in = 0 boundary,
# where eta diverges and cannot be compared at a fixed absolute tolerance.
MIN_SEPARATION = 0.05


def random_config(rng: np.random.Generator, feedback: str = "cev",
                  min_separation: float = MIN_SEPARATION) -> CycleConfig:
    """Gaps in [0.2, 5], temperatures in [0.1, 10], theta in [0.1, pi - 0.1]."""
    while True:
        s = QubitParams(rng.uniform(0.2, 5.0), rng.uniform(0.1, 10.0))
        d = QubitParams(rng.uniform(0.2, 5.0), rng.uniform(0.1, 10.0))
        if abs(s.gap / s.temperature - d.gap / d.temperature) >= min_separation:
            break
    if feedback == "cnot":
        return CycleConfig(s, d)
    return CycleConfig(s, d, theta=rng.uniform(0.1, math.pi - 0.1), phi=rng.uniform(0, 2 * math.pi),
                       feedback="cev")


def random_density_matrix(rng: np.random.Generator, rank: int = 4) -> np.ndarray:
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_entangled(rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_unitary(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))
