"""Gate primitives and the CNOT-from-native-coupling construction.

The native two-qubit gate is generated by the coupling
``E_L (sx sx - sy sy)``, which only mixes ``|0,0>`` and ``|1,1>``. Evolving for
``t0 = pi / (4 E_L)`` gives a bSWAP-type gate, locally equivalent to i-SWAP.

A CNOT is assembled from two native windows and five single-qubit rotations:

    stage 1  [+-pi/2]_X and [+-pi/2]_Z on the first qubit, [+-pi/2]_Z on the second
    stage 2  native window
    stage 3  [+-pi/2]_X on the second qubit
    stage 4  native window
    stage 5  [+-pi/2]_Z on the first qubit

With the rotations placed as written (first qubit = S) and signs
``(+, +, -, +, +)`` this yields a CNOT controlled by D. The CNOT controlled by
S is the same sequence with the qubit roles mirrored. ``verify_decomposition``
finds a working assignment by exhaustive search instead of assuming one.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .qmat import (
    I4,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    distance_up_to_global_phase,
    expm_hermitian,
    kron,
    on_qubit,
)

DECOMPOSITION_TOL = 1e-10
PRINTED_SIGNS = (1, 1, -1, 1, 1)
ROLES = ("printed", "mirrored")
CORRECTIONS = (None, "S", "D")
STEP_KINDS = ("rot_x", "rot_z", "native_evolve", "barrier")

_AXES = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class DecompositionError(RuntimeError):
    """No candidate sequence reproduces the target gate."""

    def __init__(self, message: str, best_distance: float):
        super().__init__(message)
        self.best_distance = best_distance


def hamiltonian(delta_s: float, delta_d: float, e_l: float) -> np.ndarray:
    """Two-qubit Hamiltonian with per-qubit ``gap |1><1|`` and the XY-type coupling."""
    diag = np.diag([0.0, delta_d, delta_s, delta_s + delta_d]).astype(complex)
    coupling = kron(PAULI_X, PAULI_X) - kron(PAULI_Y, PAULI_Y)
    return diag + e_l * coupling


def rot(axis: str, theta: float, target: str) -> np.ndarray:
    """``exp(-i theta/2 sigma_axis)`` on ``target``, identity on the other qubit."""
    if not math.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta}")
    try:
        pauli = _AXES[axis.upper()]
    except KeyError:
        raise ValueError(f"unknown axis {axis!r}") from None
    single = math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * pauli
    return on_qubit(single, target)


def native_duration(e_l: float) -> float:
    if not e_l > 0:
        raise ValueError(f"coupling must be > 0, got {e_l}")
    return math.pi / (4.0 * e_l)


def iswap_primitive(e_l: float) -> tuple[np.ndarray, float]:
    """Native gate from evolving the pure coupling for ``t0 = pi/(4 e_l)``."""
    t0 = native_duration(e_l)
    return expm_hermitian(hamiltonian(0.0, 0.0, e_l), t0), t0


def cnot(control: str) -> np.ndarray:
    if control == "S":
        perm = [0, 1, 3, 2]
    elif control == "D":
        perm = [0, 3, 2, 1]
    else:
        raise ValueError(f"unknown control {control!r}")
    return I4[perm].copy()


def swap() -> np.ndarray:
    return I4[[0, 2, 1, 3]].copy()


def feedback_states(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Images of ``|1>`` and ``|0>`` under the conditional rotation, on (|0>, |1>)."""
    e = np.exp(1j * phi)
    one = np.array([math.sin(theta) * e, math.cos(theta)], dtype=complex)
    zero = np.array([math.cos(theta) * e, -math.sin(theta)], dtype=complex)
    return one, zero


def cev(theta: float, phi: float) -> np.ndarray:
    """Conditional evolution: apply ``U_c`` to S only when D is excited."""
    one, zero = feedback_states(theta, phi)
    u_c = np.column_stack([zero, one])
    u = np.zeros((4, 4), dtype=complex)
    # D = |0> branch: identity on S.
    u[np.ix_([0, 2], [0, 2])] = np.eye(2)
    # D = |1> branch: U_c on S.
    u[np.ix_([1, 3], [1, 3])] = u_c
    return u


@dataclass(frozen=True)
class GateStep:
    kind: str
    target: str
    angle: float | None = None
    duration: float | None = None

    def __post_init__(self):
        if self.kind not in STEP_KINDS:
            raise ValueError(f"unknown step kind {self.kind!r}")
        if self.angle is not None and not math.isfinite(self.angle):
            raise ValueError("step angle must be finite")

    def unitary(self, e_l: float) -> np.ndarray:
        if self.kind == "rot_x":
            return rot("X", self.angle, self.target)
        if self.kind == "rot_z":
            return rot("Z", self.angle, self.target)
        if self.kind == "native_evolve":
            return expm_hermitian(hamiltonian(0.0, 0.0, e_l), self.duration)
        return I4


@dataclass(frozen=True)
class GateSequence:
    steps: tuple[GateStep, ...]
    e_l: float
    signs: tuple[int, ...]
    roles: str = "printed"
    correction: str | None = None
    metadata: dict = field(default_factory=dict)

    def unitary(self) -> np.ndarray:
        u = I4.copy()
        for step in self.steps:
            u = step.unitary(self.e_l) @ u
        return u

    def count(self, kind: str) -> int:
        return sum(1 for s in self.steps if s.kind == kind)

    def to_dict(self) -> dict:
        return {
            "e_l": self.e_l,
            "signs": list(self.signs),
            "roles": self.roles,
            "correction": self.correction,
            "metadata": dict(self.metadata),
            "steps": [
                {
                    "index": i,
                    "kind": s.kind,
                    "target": s.target,
                    "angle": s.angle,
                    "duration": s.duration,
                }
                for i, s in enumerate(self.steps)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def build_sequence(e_l: float, signs=PRINTED_SIGNS, roles: str = "printed",
                   correction: str | None = None) -> GateSequence:
    if len(signs) != 5 or any(s not in (1, -1) for s in signs):
        raise ValueError(f"signs must be five entries of +-1, got {signs}")
    if roles not in ROLES:
        raise ValueError(f"roles must be one of {ROLES}")
    first, second = ("S", "D") if roles == "printed" else ("D", "S")
    t0 = native_duration(e_l)
    half = math.pi / 2
    steps = []
    if correction is not None:
        steps.append(GateStep("rot_x", correction, angle=math.pi))
    steps += [
        GateStep("rot_x", first, angle=signs[0] * half),
        GateStep("rot_z", first, angle=signs[1] * half),
        GateStep("rot_z", second, angle=signs[2] * half),
        GateStep("native_evolve", "both", duration=t0),
        GateStep("rot_x", second, angle=signs[3] * half),
        GateStep("native_evolve", "both", duration=t0),
        GateStep("rot_z", first, angle=signs[4] * half),
    ]
    return GateSequence(
        steps=tuple(steps),
        e_l=e_l,
        signs=tuple(int(s) for s in signs),
        roles=roles,
        correction=correction,
        metadata={"rotation_convention": "exp(-i*angle/2*sigma)", "first_qubit": first},
    )


def cnot_from_sequence(e_l: float, signs=PRINTED_SIGNS, roles: str = "printed",
                       correction: str | None = None) -> tuple[np.ndarray, GateSequence]:
    seq = build_sequence(e_l, signs, roles, correction)
    return seq.unitary(), seq


@dataclass(frozen=True)
class DecompositionReport:
    best_signs: tuple[int, ...]
    roles: str
    correction: str | None
    distance: float
    candidates: int
    sequence: GateSequence

    @property
    def local_corrections(self) -> list[str]:
        out = []
        if self.roles == "mirrored":
            out.append("qubit roles mirrored")
        if self.correction is not None:
            out.append(f"X(pi) on {self.correction}")
        return out

    def to_dict(self) -> dict:
        return {
            "best_signs": list(self.best_signs),
            "roles": self.roles,
            "correction": self.correction,
            "local_corrections": self.local_corrections,
            "distance": self.distance,
            "candidates": self.candidates,
            "native_windows": self.sequence.count("native_evolve"),
            "sequence": self.sequence.to_dict(),
        }


def _sign_order():
    # Printed signs first so they win ties.
    rest = [s for s in itertools.product((1, -1), repeat=5) if s != PRINTED_SIGNS]
    return [PRINTED_SIGNS] + rest


def verify_decomposition(e_l: float, target=None, tol: float = DECOMPOSITION_TOL) -> DecompositionReport:
    """Search sign choices, qubit roles and one optional X(pi) for a sequence matching ``target``.

    ``target`` defaults to ``cnot("S")``. The first candidate (printed signs,
    printed roles, no correction preferred) within ``tol`` is returned.
    """
    if not e_l > 0:
        raise ValueError(f"coupling must be > 0, got {e_l}")
    if target is None:
        target = cnot("S")
    best = None
    n = 0
    for correction in CORRECTIONS:
        for roles in ROLES:
            for signs in _sign_order():
                u, seq = cnot_from_sequence(e_l, signs, roles, correction)
                d = distance_up_to_global_phase(u, target)
                n += 1
                if best is None or d < best[0]:
                    best = (d, seq)
                if d < tol:
                    return DecompositionReport(signs, roles, correction, d, n, seq)
    raise DecompositionError(
        f"no sequence within {tol:g} of target; best distance {best[0]:.3e}", best[0]
    )
