"""Dense complex linear algebra for 2x2 and 4x4 operators.

Matrices are plain ``numpy`` complex arrays. The joint basis is
``|q_S, q_D>`` with index ``2*q_S + q_D``, i.e. ``|0,0>, |0,1>, |1,0>, |1,1>``,
where ``|1>`` is the excited level.
"""
from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-12
STRUCT_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
# Computational-basis Paulis on (|0>, |1>).
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

SUBSYSTEMS = ("S", "D")


class InvalidStateError(ValueError):
    """Raised when a matrix is not a valid density matrix."""


def as_matrix(a, dims=(2, 4)) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise ValueError(f"expected a square matrix of dimension {dims}, got shape {m.shape}")
    return m


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def is_hermitian(a, tol: float = STRUCT_TOL) -> bool:
    m = as_matrix(a)
    return bool(np.max(np.abs(m - dag(m))) <= tol)


def is_unitary(a, tol: float = STRUCT_TOL) -> bool:
    m = as_matrix(a)
    return bool(np.max(np.abs(dag(m) @ m - np.eye(m.shape[0]))) <= tol)


def is_psd(a, tol: float = STRUCT_TOL) -> bool:
    m = as_matrix(a)
    if not is_hermitian(m, tol):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (m + dag(m))).min() >= -tol)


def is_density_matrix(a, tol: float = STRUCT_TOL) -> bool:
    m = as_matrix(a)
    return is_psd(m, tol) and abs(np.trace(m) - 1.0) <= tol


def kron(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 operators, ``a`` acting on S and ``b`` on D."""
    a = as_matrix(a, dims=(2,))
    b = as_matrix(b, dims=(2,))
    return np.kron(a, b)


def on_qubit(op, target: str) -> np.ndarray:
    """Embed a single-qubit operator on ``target`` ("S" or "D")."""
    if target == "S":
        return kron(op, I2)
    if target == "D":
        return kron(I2, op)
    raise ValueError(f"unknown subsystem {target!r}; expected 'S' or 'D'")


def expm_hermitian(h, t: float) -> np.ndarray:
    """Return ``exp(-i h t)`` for Hermitian ``h`` via its eigendecomposition."""
    h = as_matrix(h)
    if not is_hermitian(h, HERMITIAN_TOL):
        raise ValueError("expm_hermitian requires a Hermitian matrix")
    w, v = np.linalg.eigh(0.5 * (h + dag(h)))
    return (v * np.exp(-1j * w * t)) @ dag(v)


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduced 2x2 state of subsystem ``keep`` from a 4x4 joint state."""
    rho = as_matrix(rho, dims=(4,))
    if not is_hermitian(rho, STRUCT_TOL):
        raise InvalidStateError("partial_trace requires a Hermitian input")
    r = rho.reshape(2, 2, 2, 2)
    if keep == "S":
        return np.einsum("ijkj->ik", r)
    if keep == "D":
        return np.einsum("jijk->ik", r)
    raise ValueError(f"unknown subsystem {keep!r}; expected 'S' or 'D'")


def eigenvalues(rho) -> np.ndarray:
    """Eigenvalues of a density matrix with round-off negatives clamped to zero."""
    rho = as_matrix(rho)
    if not is_hermitian(rho, STRUCT_TOL):
        raise InvalidStateError("density matrix is not Hermitian")
    lam = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))
    if lam.min() < -STRUCT_TOL:
        raise InvalidStateError(f"negative eigenvalue {lam.min():.3e}")
    return np.clip(lam, 0.0, None)


def vn_entropy(rho) -> float:
    """Von Neumann entropy in nats, with ``0 ln 0 = 0``."""
    lam = eigenvalues(rho)
    if abs(lam.sum() - 1.0) > STRUCT_TOL:
        raise InvalidStateError(f"trace {lam.sum():.12g} is not 1")
    lam = lam[lam > 0.0]
    return float(-np.sum(lam * np.log(lam)))


def trace_distance(rho, sigma) -> float:
    diff = as_matrix(rho) - as_matrix(sigma)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + dag(diff))))))


def distance_up_to_global_phase(u, v) -> float:
    """Max-entry distance between ``u`` and ``e^{i a} v``, ``a`` aligned by ``tr(v^dag u)``."""
    u = as_matrix(u)
    v = as_matrix(v)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {v.shape}")
    overlap = np.trace(dag(v) @ u)
    if abs(overlap) < 1e-14:
        return float(np.max(np.abs(u - v)))
    phase = overlap / abs(overlap)
    return float(np.max(np.abs(u - phase * v)))


def conjugate(u, rho) -> np.ndarray:
    """``u rho u^dag``."""
    return u @ rho @ dag(u)


def frozen(a) -> np.ndarray:
    """Read-only complex copy, for storing inside immutable records."""
    m = np.array(a, dtype=complex)
    m.flags.writeable = False
    return m
