import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from demon_engine import gates
from demon_engine.qmat import I4, PAULI_Z, distance_up_to_global_phase, is_unitary, on_qubit
from demon_engine.states import basis_projector


def ket(qs, qd):
    v = np.zeros(4, dtype=complex)
    v[2 * qs + qd] = 1
    return v


def test_hamiltonian_examples():
    assert np.array_equal(gates.hamiltonian(0, 0, 0), np.zeros((4, 4)))
    assert np.allclose(gates.hamiltonian(2, 1, 0), np.diag([0, 1, 2, 3]))
    h = gates.hamiltonian(0, 0, 1)
    expected = np.zeros((4, 4))
    expected[0, 3] = expected[3, 0] = 2
    assert np.allclose(h, expected)


def test_rotation_examples():
    assert np.allclose(gates.rot("X", 0, "S"), I4)
    assert np.allclose(gates.rot("Z", math.pi, "S"), -1j * on_qubit(PAULI_Z, "S"))
    half = gates.rot("X", math.pi / 2, "D")
    assert np.allclose(half @ half, gates.rot("X", math.pi, "D"))


def test_rotation_rejects_bad_input():
    with pytest.raises(ValueError):
        gates.rot("W", 1.0, "S")
    with pytest.raises(ValueError):
        gates.rot("X", math.nan, "S")


def test_native_gate():
    u, t0 = gates.iswap_primitive(1.0)
    assert t0 == pytest.approx(math.pi / 4)
    assert u[3, 0] == pytest.approx(-1j)
    assert u[0, 3] == pytest.approx(-1j)
    assert np.allclose(u @ ket(0, 1), ket(0, 1))
    assert np.allclose(u @ ket(1, 0), ket(1, 0))
    assert np.allclose(np.linalg.matrix_power(u, 4), I4, atol=1e-12)


def test_native_gate_rejects_nonpositive_coupling():
    for e_l in (0.0, -1.0):
        with pytest.raises(ValueError):
            gates.iswap_primitive(e_l)


def test_cnot_maps():
    assert np.allclose(gates.cnot("S") @ ket(1, 0), ket(1, 1))
    assert np.allclose(gates.cnot("S") @ ket(0, 1), ket(0, 1))
    assert np.allclose(gates.cnot("D") @ ket(0, 1), ket(1, 1))
    assert np.allclose(gates.cnot("D") @ ket(1, 0), ket(1, 0))
    with pytest.raises(ValueError):
        gates.cnot("X")


def test_cnot_s_permutes_thermal_populations():
    # diag(p00, p01, p10, p11) -> diag(p00, p01, p11, p10)
    p = np.array([0.5, 0.2, 0.2, 0.1])
    out = gates.cnot("S") @ np.diag(p) @ gates.cnot("S").T
    assert np.allclose(np.diag(out), [0.5, 0.2, 0.1, 0.2])


def test_cev_identity_branch():
    u = gates.cev(0.0, 0.0)
    for qs in (0, 1):
        assert np.allclose(u @ ket(qs, 0), ket(qs, 0))


def test_cev_half_pi_is_not_up_to_branch_sign():
    u = gates.cev(math.pi / 2, 0.0)
    assert np.allclose(u @ ket(1, 1), ket(0, 1))
    assert np.allclose(u @ ket(0, 1), -ket(1, 1))


def test_cev_half_pi_matches_cnot_on_diagonal_states():
    rho = np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)
    a = gates.cev(math.pi / 2, 0.0)
    b = gates.cnot("D")
    assert np.allclose(a @ rho @ a.conj().T, b @ rho @ b.T)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_cev_is_unitary_and_block_diagonal(theta, phi):
    u = gates.cev(theta, phi)
    assert is_unitary(u, 1e-12)
    assert np.allclose(u[np.ix_([0, 2], [1, 3])], 0)
    assert np.allclose(u[np.ix_([0, 2], [0, 2])], np.eye(2))


@pytest.mark.parametrize("e_l", [0.5, 1.0, 2.0])
def test_decomposition_certified(e_l):
    rep = gates.verify_decomposition(e_l)
    assert rep.distance < 1e-10
    assert rep.sequence.count("native_evolve") == 2
    for step in rep.sequence.steps:
        if step.kind == "native_evolve":
            assert step.duration == pytest.approx(math.pi / (4 * e_l))
    assert distance_up_to_global_phase(rep.sequence.unitary(), gates.cnot("S")) < 1e-10


def test_decomposition_stable_across_couplings():
    reps = [gates.verify_decomposition(e) for e in (0.5, 1.0, 2.0)]
    assert len({(r.best_signs, r.roles, r.correction) for r in reps}) == 1


def test_printed_sequence_gives_cnot_controlled_by_d():
    u, _ = gates.cnot_from_sequence(1.0)
    assert distance_up_to_global_phase(u, gates.cnot("D")) < 1e-10


def test_decomposition_for_demon_controlled_target():
    rep = gates.verify_decomposition(1.0, gates.cnot("D"))
    assert rep.best_signs == gates.PRINTED_SIGNS
    assert rep.roles == "printed"
    assert rep.correction is None


def test_wrong_target_raises_with_best_distance():
    with pytest.raises(gates.DecompositionError) as info:
        gates.verify_decomposition(1.0, gates.swap())
    assert info.value.best_distance > 1e-3


def test_sequence_serialization_round_trip():
    rep = gates.verify_decomposition(1.0)
    data = json.loads(rep.sequence.to_json())
    assert data["roles"] == rep.roles
    assert len(data["steps"]) == len(rep.sequence.steps)
    assert rep.to_dict()["native_windows"] == 2


def test_build_sequence_validates_signs():
    with pytest.raises(ValueError):
        gates.build_sequence(1.0, signs=(1, 1, 1))
    with pytest.raises(ValueError):
        gates.build_sequence(1.0, signs=(1, 1, 2, 1, 1))


def test_native_gate_leaves_odd_parity_populations():
    u, _ = gates.iswap_primitive(1.3)
    rho = basis_projector(0, 1)
    assert np.allclose(u @ rho @ u.conj().T, rho)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from("XYZ"), st.floats(-10, 10), st.sampled_from("SD"), st.floats(0.1, 5))
def test_every_constructed_gate_is_unitary(axis, angle, target, e_l):
    assert np.max(np.abs(gates.rot(axis, angle, target).conj().T @ gates.rot(axis, angle, target) - I4)) < 1e-10
    u, _ = gates.iswap_primitive(e_l)
    assert np.max(np.abs(u.conj().T @ u - I4)) < 1e-10
    for g in (gates.cnot("S"), gates.cnot("D"), gates.swap(), gates.build_sequence(e_l).unitary()):
        assert np.max(np.abs(g.conj().T @ g - I4)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3))
def test_cev_and_demon_cnot_agree_on_random_diagonal_states(weights):
    rho = np.diag(np.array(weights) / sum(weights)).astype(complex)
    a, b = gates.cev(math.pi / 2, 0.0), gates.cnot("D")
    assert np.max(np.abs(a @ rho @ a.conj().T - b @ rho @ b.conj().T)) < 1e-12


def test_cnot_s_on_thermal_state_is_permutation():
    from demon_engine.states import QubitParams, joint_thermal_state

    j = joint_thermal_state(QubitParams(2.0, 2.0), QubitParams(1.0, 0.5))
    u = gates.cnot("S")
    out = u @ np.array(j.rho) @ u.conj().T
    expected = np.diag([j.prob(0, 0), j.prob(0, 1), j.prob(1, 1), j.prob(1, 0)])
    assert np.array_equal(out, expected)
