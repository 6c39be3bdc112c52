import numpy as np
import pytest

from app.core.errors import NotSealFormatError, RecordMismatchError
from app.services.attack import (
    collective_attack,
    collective_projectors,
    disturbance_report,
    single_qubit_attack,
)
from app.services.qla import StateVector, basis_state, fidelity, tensor_all
from app.services.seal import (
    CONTROL_STATES,
    SINGLE_QUBIT_BASES as KET,
    SealedMemory,
    alice_check,
    bob_check,
    distribute_copies,
    seal_message,
    triplet_family,
    triplet_state,
)


class TestSingleQubitAttack:
    def test_protocol_triplet_half_fidelity(self, rng):
        state = tensor_all(KET["0"], KET["0_y"], KET["0"])
        for _ in range(50):
            memory = SealedMemory([state])
            outcome = single_qubit_attack(memory, rng)
            assert outcome.bits == (0,)
            assert outcome.per_triplet_fidelity[0] == pytest.approx(0.5)

    def test_eigenstate_undisturbed(self, rng):
        outcome = single_qubit_attack(SealedMemory([basis_state("110")]), rng)
        assert outcome.bits == (1,)
        assert outcome.per_triplet_fidelity == pytest.approx((1.0,))

    def test_detected_by_alice(self, rng, within_3sigma):
        trials = 10_000
        detected = 0
        for _ in range(trials):
            memory, record = seal_message([int(rng.integers(2))], rng)
            single_qubit_attack(memory, rng)
            detected += alice_check(memory, record, rng).detected
        assert within_3sigma(detected, trials, 0.5)


class TestCollectiveAttack:
    def test_protocol_triplet(self):
        state = tensor_all(KET["0"], KET["0_y"], KET["0"])
        memory = SealedMemory([state])
        outcome = collective_attack(memory)
        assert outcome.bits == (0,)
        assert outcome.per_triplet_fidelity[0] >= 1 - 1e-12

    def test_one_with_x_control(self):
        memory = SealedMemory([tensor_all(KET["1"], KET["1"], KET["1_x"])])
        outcome = collective_attack(memory)
        assert outcome.bits == (1,)
        assert outcome.per_triplet_fidelity[0] >= 1 - 1e-12

    def test_all_valid_triplets(self):
        for bit in (0, 1):
            for position in range(3):
                for control in CONTROL_STATES:
                    state = triplet_state(bit, position, control)
                    memory = SealedMemory([state])
                    outcome = collective_attack(memory)
                    assert outcome.bits == (bit,)
                    assert fidelity(state, memory[0]) >= 1 - 1e-12

    def test_perfect_break(self, rng):
        for _ in range(100):
            bits = [int(b) for b in rng.integers(0, 2, size=8)]
            memory, record = seal_message(bits, rng)
            grant = distribute_copies(record, [(i, p) for i in range(8) for p in range(3)])
            outcome = collective_attack(memory)
            assert list(outcome.bits) == bits
            assert min(outcome.per_triplet_fidelity) >= 1 - 1e-12
            report, _ = bob_check(memory, grant, rng)
            assert not report.detected
            assert not alice_check(memory, record, rng).detected

    def test_foreign_state_rejected_atomically(self):
        ghz = StateVector.normalized(np.eye(8)[0] + np.eye(8)[7])
        valid = triplet_state(0, 0, CONTROL_STATES[0])
        memory = SealedMemory([valid, ghz])
        with pytest.raises(NotSealFormatError):
            collective_attack(memory)
        assert memory[0] is valid and memory[1] is ghz


class TestSubspaceStructure:
    def test_families_are_orthogonal(self):
        p0, p1 = collective_projectors()
        for bit, foreign in ((0, p1), (1, p0)):
            for state in triplet_family(bit):
                assert np.linalg.norm(foreign.apply(state)) <= 1e-12

    def test_family_states_are_not_distinguishable(self):
        for bit in (0, 1):
            states = np.column_stack([s.amps for s in triplet_family(bit)])
            gram = np.abs(states.conj().T @ states)
            off_diagonal = gram - np.diag(np.diag(gram))
            assert not np.allclose(gram, np.eye(12))
            assert off_diagonal.max() >= 0.5


class TestDisturbanceReport:
    def test_examples(self):
        sealed = tensor_all(KET["0"], KET["0_y"], KET["0"])
        assert disturbance_report([sealed], [sealed]) == pytest.approx([1.0])
        assert disturbance_report([basis_state("000")], [basis_state("010")]) == pytest.approx([0.0])
        assert disturbance_report([sealed], [basis_state("000")]) == pytest.approx([0.5])

    def test_snapshot_against_memory(self, rng):
        memory, _ = seal_message([1, 0, 1], rng)
        before = memory.snapshot()
        collective_attack(memory)
        assert disturbance_report(before, memory) == pytest.approx([1.0] * 3)

    def test_length_mismatch(self):
        with pytest.raises(RecordMismatchError):
            disturbance_report([basis_state("000")], [])
