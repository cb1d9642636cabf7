"""Core linear algebra: construction contracts, tensor ordering, metrics, JSON."""

import json

import numpy as np
import pytest

from qreplica import config
from qreplica.errors import CapacityError, ContractError, InputError
from qreplica.linalg import (
    Operator,
    StateVector,
    apply,
    basis_state,
    fidelity,
    identity,
    operator_from_json,
    operator_to_json,
    phase_invariant_distance,
    random_state,
    random_unitary,
    state_from_json,
    state_to_json,
    tensor_op,
    tensor_state,
)

INV_SQRT2 = 1.0 / np.sqrt(2.0)


class TestStateVector:
    def test_basis_state(self):
        s = basis_state(4, 2)
        np.testing.assert_array_equal(s.amps, [0, 0, 1, 0])
        assert s.dim == 4

    def test_rejects_unnormalized(self):
        with pytest.raises(ContractError, match="norm"):
            StateVector(np.array([1.0, 1.0]))

    def test_rejects_non_finite(self):
        with pytest.raises(ContractError, match="finite"):
            StateVector(np.array([np.nan, 0.0]))

    def test_rejects_empty(self):
        with pytest.raises(ContractError):
            StateVector(np.array([], dtype=complex))

    def test_normalized_constructor(self):
        s = StateVector.normalized([1, 1j])
        assert abs(np.linalg.norm(s.amps) - 1.0) < 1e-15

    def test_normalized_rejects_zero(self):
        with pytest.raises(ContractError):
            StateVector.normalized([0.0, 0.0])

    def test_amps_frozen(self):
        s = basis_state(2, 0)
        with pytest.raises(ValueError):
            s.amps[0] = 0.0


class TestOperator:
    def test_unitarity_certificate(self):
        assert identity(3).is_unitary
        assert not Operator(np.array([[1.0, 0.0], [0.0, 2.0]])).is_unitary

    def test_rejects_non_square(self):
        with pytest.raises(ContractError):
            Operator(np.ones((2, 3)))

    def test_residual_value(self):
        op = Operator(np.array([[1.0, 0.0], [0.0, 1.0 + 1e-3]]))
        assert op.unitary_residual == pytest.approx((1 + 1e-3) ** 2 - 1, rel=1e-6)


class TestTensorOrdering:
    """The first factor occupies the slow (most significant) index."""

    def test_basis_pair(self):
        out = tensor_state(basis_state(2, 0), basis_state(2, 1))
        np.testing.assert_array_equal(out.amps, [0, 1, 0, 0])

    def test_bilinearity(self):
        plus = StateVector.normalized([1, 1])
        out = tensor_state(plus, basis_state(2, 0))
        np.testing.assert_allclose(out.amps, [INV_SQRT2, 0, INV_SQRT2, 0], atol=1e-15)

    def test_index_arithmetic(self):
        out = tensor_state(basis_state(3, 2), basis_state(3, 1))
        assert out.dim == 9
        assert np.argmax(np.abs(out.amps)) == 2 * 3 + 1

    def test_tensor_op_identity(self):
        out = tensor_op(identity(2), identity(2))
        np.testing.assert_array_equal(out.entries, np.eye(4))

    def test_x_tensor_i_on_00(self):
        x = Operator(np.array([[0, 1], [1, 0]], dtype=complex))
        joint = tensor_op(x, identity(2))
        out = apply(joint, tensor_state(basis_state(2, 0), basis_state(2, 0)))
        np.testing.assert_allclose(out.amps, basis_state(4, 2).amps, atol=1e-15)

    def test_mixed_product_random(self, rng):
        """(A⊗B)(x⊗y) = (Ax)⊗(By), computed densely on both sides."""
        a, b = random_unitary(3, rng), random_unitary(3, rng)
        x, y = random_state(3, rng), random_state(3, rng)
        left = apply(tensor_op(a, b), tensor_state(x, y))
        right = tensor_state(apply(a, x), apply(b, y))
        np.testing.assert_allclose(left.amps, right.amps, atol=1e-12)

    def test_mixed_product_law_across_dims(self, rng):
        for _ in range(25):
            da, db = int(rng.integers(2, 5)), int(rng.integers(2, 5))
            a, b = random_unitary(da, rng), random_unitary(db, rng)
            x, y = random_state(da, rng), random_state(db, rng)
            left = apply(tensor_op(a, b), tensor_state(x, y))
            right = tensor_state(apply(a, x), apply(b, y))
            np.testing.assert_allclose(left.amps, right.amps, atol=1e-12)

    def test_capacity_error(self, monkeypatch):
        monkeypatch.setenv(config.ENV_MAX_DIM, "16")
        with pytest.raises(CapacityError):
            tensor_state(random_state(5, np.random.default_rng(0)), basis_state(5, 0))

    def test_bad_max_dim_env(self, monkeypatch):
        monkeypatch.setenv(config.ENV_MAX_DIM, "lots")
        with pytest.raises(InputError):
            config.max_dim()


class TestApply:
    def test_identity(self, rng):
        psi = random_state(4, rng)
        np.testing.assert_allclose(apply(identity(4), psi).amps, psi.amps)

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            apply(identity(3), basis_state(2, 0))

    def test_unitary_preserves_norm(self, rng):
        """Norm preservation across >= 100 random (op, state) pairs per dim."""
        for dim in range(2, 9):
            for _ in range(100):
                out = apply(random_unitary(dim, rng), random_state(dim, rng))
                assert abs(np.linalg.norm(out.amps) - 1.0) < 1e-12


class TestFidelity:
    def test_self(self, rng):
        psi = random_state(5, rng)
        assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_basis(self):
        assert fidelity(basis_state(2, 0), basis_state(2, 1)) == 0.0

    def test_half_overlap(self):
        plus = StateVector.normalized([1, 1])
        assert fidelity(plus, basis_state(2, 0)) == pytest.approx(0.5, abs=1e-12)

    def test_symmetric_and_bounded(self, rng):
        for _ in range(50):
            dim = int(rng.integers(2, 7))
            a, b = random_state(dim, rng), random_state(dim, rng)
            f = fidelity(a, b)
            assert f == pytest.approx(fidelity(b, a), abs=1e-15)
            assert 0.0 <= f <= 1.0 + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ContractError):
            fidelity(basis_state(2, 0), basis_state(3, 0))


class TestPhaseInvariantDistance:
    def test_zero_on_self(self, rng):
        u = random_unitary(4, rng)
        assert phase_invariant_distance(u, u) == 0.0

    def test_global_phase_invisible(self, rng):
        """Phased copies sit at the metric's numerical zero (the sqrt noise floor)."""
        u = random_unitary(3, rng)
        for phi in (0.3, np.pi / 2, 2.0):
            v = Operator(np.exp(1j * phi) * u.entries)
            assert phase_invariant_distance(u, v) <= 1e-7

    def test_identity_vs_flip(self):
        x = Operator(np.array([[0, 1], [1, 0]], dtype=complex))
        assert phase_invariant_distance(identity(2), x) == pytest.approx(1.0, abs=1e-15)

    def test_triangle_sanity(self, rng):
        """d(A,C) <= d(A,B) + d(B,C) with documented numerical slack."""
        for _ in range(100):
            dim = int(rng.integers(2, 6))
            a, b, c = (random_unitary(dim, rng) for _ in range(3))
            assert phase_invariant_distance(a, c) <= (
                phase_invariant_distance(a, b) + phase_invariant_distance(b, c) + 1e-9
            )

    def test_rejects_non_unitary(self):
        bad = Operator(np.array([[1.0, 0.0], [0.0, 2.0]]))
        with pytest.raises(ContractError, match="unitary"):
            phase_invariant_distance(bad, identity(2))


class TestJson:
    def test_state_round_trip(self, rng):
        psi = random_state(6, rng)
        back = state_from_json(json.loads(json.dumps(state_to_json(psi))))
        np.testing.assert_allclose(back.amps, psi.amps, rtol=1e-15, atol=0.0)

    def test_operator_round_trip(self, rng):
        op = random_unitary(4, rng)
        back = operator_from_json(json.loads(json.dumps(operator_to_json(op))))
        np.testing.assert_allclose(back.entries, op.entries, rtol=1e-15, atol=0.0)

    def test_state_shape_errors(self):
        with pytest.raises(InputError):
            state_from_json({"dim": 2, "amps": [[1.0, 0.0]]})
        with pytest.raises(InputError):
            state_from_json({"dim": 2, "amps": [[1.0, 0.0], [0.0]]})
        with pytest.raises(InputError):
            state_from_json([1, 0])

    def test_operator_shape_errors(self):
        with pytest.raises(InputError):
            operator_from_json({"dim": 2, "rows": [[[1, 0], [0, 0]]]})
        with pytest.raises(InputError):
            operator_from_json({"rows": []})
