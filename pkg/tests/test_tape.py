"""Tape encoding, cyclic shifts, sequential gate application, certified copying.

The joint-space oracle here is rebuilt from dense matrices inside the test
(a projector ⊗ block sum and an explicitly constructed rotation permutation),
so it shares no code with the package's own joint evolution.
"""

import itertools

import numpy as np
import pytest

import qreplica.tape
from qreplica.basis_ops import conditional_dynamics
from qreplica.errors import ContractError, InputError, ReplicationIntegrityError
from qreplica.linalg import (
    Operator,
    basis_state,
    fidelity,
    identity,
    random_state,
    random_unitary,
)
from qreplica.tape import (
    Tape,
    format_tape,
    joint_tape_evolution,
    parse_tape,
    read_symbol,
    replicate_tape,
    run_tape,
    shift_tape,
    tape_from_json,
    tape_index,
    tape_to_json,
    tape_to_state,
)

X = Operator(np.array([[0, 1], [1, 0]], dtype=complex))


def joint_oracle(t, gates, payload):
    """Dense-matrix re-derivation of the s-step joint evolution."""
    n, s, m = t.alphabet_size, t.length, payload.dim
    cond = np.zeros((n * m, n * m), dtype=complex)
    for l, gate in enumerate(gates):
        projector = np.zeros((n, n), dtype=complex)
        projector[l, l] = 1.0
        cond += np.kron(projector, gate.entries)
    step = np.kron(np.eye(n ** (s - 1), dtype=complex), cond)
    perm = np.zeros((n**s, n**s), dtype=complex)
    for x in range(n**s):
        digits = [(x // n**i) % n for i in range(s)]
        y = sum(digits[(j + 1) % s] * n**j for j in range(s))
        perm[y, x] = 1.0
    rot = np.kron(perm, np.eye(m, dtype=complex))
    vec = np.kron(tape_to_state(t).amps, payload.amps)
    for _ in range(s):
        vec = rot @ (step @ vec)
    return vec


class TestTapeType:
    def test_symbol_out_of_alphabet(self):
        with pytest.raises(ContractError, match="alphabet"):
            Tape(2, (0, 2))

    def test_head_out_of_range(self):
        with pytest.raises(ContractError, match="head"):
            Tape(2, (0, 1), head=2)

    def test_needs_a_cell(self):
        with pytest.raises(ContractError):
            Tape(2, ())

    def test_value_equality(self):
        assert Tape(2, (1, 0)) == Tape(2, (1, 0))
        assert Tape(2, (1, 0)) != Tape(2, (0, 1))


class TestTapeState:
    def test_single_cell(self):
        out = tape_to_state(Tape(2, (0,)))
        np.testing.assert_array_equal(out.amps, [1, 0])

    def test_positional_encoding(self):
        """Cells read as a numeral: (1,0) over a binary alphabet is index 2."""
        out = tape_to_state(Tape(2, (1, 0)))
        assert out.dim == 4
        assert np.argmax(np.abs(out.amps)) == 2

    def test_head_does_not_enter_the_state(self):
        a = tape_to_state(Tape(3, (2, 1), head=0))
        b = tape_to_state(Tape(3, (2, 1), head=1))
        np.testing.assert_array_equal(a.amps, b.amps)

    def test_exhaustive_orthogonality(self):
        """All 64 pairs of distinct 3-cell binary tapes are orthogonal."""
        tapes = [Tape(2, cells) for cells in itertools.product(range(2), repeat=3)]
        states = [tape_to_state(t) for t in tapes]
        for i, a in enumerate(states):
            for j, b in enumerate(states):
                expected = 1.0 if i == j else 0.0
                assert fidelity(a, b) == pytest.approx(expected, abs=1e-15)

    def test_injective(self):
        seen = set()
        for cells in itertools.product(range(3), repeat=3):
            seen.add(tape_index(Tape(3, cells)))
        assert len(seen) == 27


class TestShift:
    def test_single_cell_fixed_point(self):
        t = Tape(2, (1,))
        assert shift_tape(t).head == 0

    def test_wraparound(self):
        assert shift_tape(Tape(2, (0, 1, 1), head=2)).head == 0

    def test_s_shifts_restore(self):
        """Cycling through every cell returns the tape to its initial state."""
        for s in range(1, 7):
            t = Tape(3, tuple(i % 3 for i in range(s)), head=0)
            cur = t
            for _ in range(s):
                cur = shift_tape(cur)
            assert cur == t

    def test_read_follows_head(self):
        t = Tape(4, (3, 2, 1))  # cell 1 holds symbol 1, cell 3 holds symbol 3
        assert read_symbol(t) == 1
        assert read_symbol(shift_tape(t)) == 2
        assert read_symbol(shift_tape(shift_tape(t))) == 3


class TestRunTape:
    def test_identity_cells(self, rng):
        payload = random_state(3, rng)
        gates = (identity(3), random_unitary(3, rng))
        out = run_tape(Tape(2, (0, 0, 0)), gates, payload)
        np.testing.assert_allclose(out.amps, payload.amps, atol=1e-15)

    def test_involution_squared(self):
        out = run_tape(Tape(2, (1, 1)), (identity(2), X), basis_state(2, 0))
        np.testing.assert_allclose(out.amps, basis_state(2, 0).amps, atol=1e-15)

    def test_dual_oracle_agreement(self, rng):
        """Product form must match both the dense product and the joint oracle."""
        gates = (random_unitary(2, rng), random_unitary(2, rng))
        cells = tuple(int(rng.integers(0, 2)) for _ in range(5))
        t = Tape(2, cells)
        payload = basis_state(2, 0)
        out = run_tape(t, gates, payload)

        product = np.eye(2, dtype=complex)
        for c in cells:
            product = product @ gates[c].entries  # cells listed most-significant-first
        np.testing.assert_allclose(out.amps, product @ payload.amps, atol=1e-12)

        joint = joint_oracle(t, gates, payload)
        expected_joint = np.kron(tape_to_state(t).amps, out.amps)
        np.testing.assert_allclose(joint, expected_joint, atol=1e-12)

    def test_composition_law(self, rng):
        """Running a concatenation equals running the parts in time order."""
        gates = tuple(random_unitary(3, rng) for _ in range(3))
        for _ in range(10):
            first = tuple(int(rng.integers(0, 3)) for _ in range(int(rng.integers(1, 4))))
            second = tuple(int(rng.integers(0, 3)) for _ in range(int(rng.integers(1, 4))))
            payload = random_state(3, rng)
            # earlier cells sit at the least significant end, so the tape that
            # runs `first` before `second` lists second's cells first
            combined = Tape(3, second + first)
            step_by_step = run_tape(Tape(3, second), gates, run_tape(Tape(3, first), gates, payload))
            np.testing.assert_allclose(
                run_tape(combined, gates, payload).amps, step_by_step.amps, atol=1e-12
            )

    def test_requires_head_at_first_cell(self):
        with pytest.raises(ContractError, match="head"):
            run_tape(Tape(2, (0, 1), head=1), (identity(2), X), basis_state(2, 0))

    def test_gate_count_must_match_alphabet(self):
        with pytest.raises(ContractError, match="one gate per symbol"):
            run_tape(Tape(3, (0,)), (identity(2), X), basis_state(2, 0))

    def test_gate_payload_dim_mismatch(self):
        with pytest.raises(ContractError, match="dim"):
            run_tape(Tape(2, (0,)), (identity(3), identity(3)), basis_state(2, 0))


class TestJointEvolution:
    def test_tape_restored_and_payload_correct(self, rng):
        """Small random instances: exact tape restoration, payload = product."""
        for _ in range(15):
            n = int(rng.integers(2, 4))
            s = int(rng.integers(1, 5))
            m = int(rng.integers(2, 4))
            if n**s * m > 2**10:
                continue
            gates = tuple(random_unitary(m, rng) for _ in range(n))
            t = Tape(n, tuple(int(rng.integers(0, n)) for _ in range(s)))
            payload = basis_state(m, 0)
            final = joint_tape_evolution(t, gates, payload)
            rows = final.amps.reshape(n**s, m)
            others = np.delete(rows, tape_index(t), axis=0)
            if others.size:
                assert np.max(np.abs(others)) == 0.0
            expected = run_tape(t, gates, payload)
            np.testing.assert_allclose(rows[tape_index(t)], expected.amps, atol=1e-10)

    def test_matches_dense_oracle(self, rng):
        gates = tuple(random_unitary(3, rng) for _ in range(2))
        t = Tape(2, (1, 0, 1))
        payload = random_state(3, rng)
        final = joint_tape_evolution(t, gates, payload)
        np.testing.assert_allclose(final.amps, joint_oracle(t, gates, payload), atol=1e-12)


class TestReplicateTape:
    def test_child_matches_parent(self):
        parent, child = replicate_tape(Tape(4, (3, 0, 1, 2), head=1))
        assert child.cells == parent.cells == (3, 0, 1, 2)
        assert child.head == parent.head

    def test_blank_tape(self):
        _, child = replicate_tape(Tape(3, (0, 0, 0)))
        assert child.cells == (0, 0, 0)

    def test_exhaustive_small_alphabet(self):
        """All 81 four-cell ternary tapes copy exactly."""
        for cells in itertools.product(range(3), repeat=4):
            _, child = replicate_tape(Tape(3, cells))
            assert child.cells == cells

    def test_idempotent_in_content(self):
        _, child = replicate_tape(Tape(5, (4, 1, 0, 3)))
        _, grandchild = replicate_tape(child)
        assert grandchild.cells == child.cells

    def test_broken_copier_raises(self, monkeypatch):
        """If the wiring stops copying, the per-cell certificate must fail."""
        monkeypatch.setattr(
            qreplica.tape, "cloner", lambda n: conditional_dynamics([identity(n)] * n)
        )
        with pytest.raises(ReplicationIntegrityError, match="fidelity"):
            replicate_tape(Tape(3, (1, 2)))


class TestTextAndJson:
    def test_round_trip_text(self):
        t = Tape(4, (3, 0, 1), head=2)
        assert parse_tape(format_tape(t)) == t

    def test_parse_example(self):
        t = parse_tape("n=2;cells=1,0;head=0")
        assert t == Tape(2, (1, 0), 0)

    def test_bad_text(self):
        for text in ("cells=1,0", "n=2;cells=;head=0", "n=2;cells=1,0;head=x", "n=two;cells=1;head=0"):
            with pytest.raises(InputError):
                parse_tape(text)

    def test_out_of_range_symbol_in_text(self):
        with pytest.raises(InputError, match="alphabet"):
            parse_tape("n=2;cells=2;head=0")

    def test_round_trip_json(self):
        t = Tape(3, (2, 0, 1), head=1)
        assert tape_from_json(tape_to_json(t)) == t

    def test_json_missing_keys(self):
        with pytest.raises(InputError):
            tape_from_json({"cells": [0, 1]})
