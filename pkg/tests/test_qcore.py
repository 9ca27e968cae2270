import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebnet.qcore import (
    QuantumState,
    StateError,
    UnitaryOperator,
    apply_unitary,
    computational_basis_state,
    fidelity_with_pure,
    generalized_bell_state,
    generalized_bell_vector,
    maximally_entangled_state,
    maximally_mixed_state,
    partial_trace,
    project_outcome,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    tensor,
    von_neumann_entropy,
    weyl_operator,
)

TOL = 1e-9
seeds = st.integers(min_value=0, max_value=2**31)
small_d = st.integers(min_value=2, max_value=4)


def assert_valid_state(s: QuantumState):
    m = s.matrix
    assert np.linalg.norm(m - m.conj().T) <= TOL
    assert abs(np.trace(m) - 1) <= TOL
    assert np.linalg.eigvalsh(m)[0] >= -TOL
    assert np.prod(s.dims) == m.shape[0]


def partial_trace_oracle(m, dims, keep):
    """Explicit index loop over every matrix element."""
    n = len(dims)
    kd = [dims[k] for k in keep]
    out = np.zeros((int(np.prod(kd)),) * 2, dtype=complex)
    for row in itertools.product(*[range(k) for k in dims]):
        for col in itertools.product(*[range(k) for k in dims]):
            if any(row[k] != col[k] for k in range(n) if k not in keep):
                continue
            r = np.ravel_multi_index([row[k] for k in keep], kd)
            c = np.ravel_multi_index([col[k] for k in keep], kd)
            out[r, c] += m[np.ravel_multi_index(row, dims), np.ravel_multi_index(col, dims)]
    return out


class TestConstruction:
    def test_basis_states(self):
        assert np.allclose(computational_basis_state(2, 0).matrix, np.diag([1, 0]))
        assert np.allclose(computational_basis_state(3, 2).matrix, np.diag([0, 0, 1]))
        assert computational_basis_state(3, 2).dims == (3,)

    def test_basis_out_of_range(self):
        with pytest.raises(ValueError):
            computational_basis_state(4, 4)

    def test_invalid_matrices_rejected(self):
        with pytest.raises(StateError):
            QuantumState(np.diag([0.5, 0.6]), (2,))
        with pytest.raises(StateError):
            QuantumState(np.array([[0.5, 1], [0, 0.5]]), (2,))
        with pytest.raises(StateError):
            QuantumState(np.diag([1.5, -0.5]), (2,))
        with pytest.raises(StateError):
            QuantumState(np.eye(4) / 4, (2, 3))

    def test_state_is_immutable(self):
        s = maximally_mixed_state(2)
        with pytest.raises(ValueError):
            s.matrix[0, 0] = 1

    def test_maximally_entangled_d2(self):
        v = np.array([1, 0, 0, 1]) / np.sqrt(2)
        s = maximally_entangled_state(2)
        assert np.allclose(s.matrix, np.outer(v, v))
        assert s.dims == (2, 2)

    def test_maximally_entangled_marginals(self):
        for d in (2, 3):
            s = maximally_entangled_state(d)
            for k in (0, 1):
                assert np.allclose(partial_trace(s, [k]).matrix, np.eye(d) / d)
        assert abs(maximally_entangled_state(3).purity() - 1) <= TOL

    def test_maximally_entangled_needs_two_levels(self):
        with pytest.raises(ValueError):
            maximally_entangled_state(1)


class TestWeyl:
    def test_paulis(self):
        assert np.allclose(weyl_operator(2, 1, 0).matrix, [[0, 1], [1, 0]])
        assert np.allclose(weyl_operator(2, 0, 1).matrix, [[1, 0], [0, -1]])

    def test_d3_example(self):
        u = weyl_operator(3, 1, 2).matrix
        assert abs(np.trace(u.conj().T @ u) / 3 - 1) <= TOL
        assert abs(np.trace(u)) <= TOL

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            weyl_operator(3, 3, 0)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_orthogonal_basis(self, d):
        ops = [weyl_operator(d, a, b).matrix for a in range(d) for b in range(d)]
        gram = np.array([[np.trace(u.conj().T @ v) / d for v in ops] for u in ops])
        assert np.allclose(gram, np.eye(d * d), atol=TOL)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_commutation(self, d):
        w = np.exp(2j * np.pi / d)
        for a, b, c, e in itertools.product(range(d), repeat=4):
            u, v = weyl_operator(d, a, b).matrix, weyl_operator(d, c, e).matrix
            assert np.linalg.norm(u @ v - w ** (b * c - a * e) * v @ u) <= TOL

    def test_non_unitary_rejected(self):
        with pytest.raises(StateError):
            UnitaryOperator(np.diag([1.0, 2.0]))


class TestBellStates:
    def test_identity_index(self):
        assert np.allclose(generalized_bell_state(2, 0, 0).matrix, maximally_entangled_state(2).matrix)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_gram_identity(self, d):
        # pairwise inner products, one at a time
        vecs = [generalized_bell_vector(d, a, b) for a in range(d) for b in range(d)]
        for i, u in enumerate(vecs):
            for j, v in enumerate(vecs):
                assert abs(np.vdot(u, v) - (i == j)) <= TOL


class TestTensorAndTrace:
    def test_mixed_product(self):
        s = tensor(maximally_mixed_state(2), maximally_mixed_state(2))
        assert np.allclose(s.matrix, np.eye(4) / 4)
        assert s.dims == (2, 2)

    def test_basis_product(self):
        s = tensor(computational_basis_state(2, 0), computational_basis_state(2, 1))
        assert np.allclose(s.matrix, np.diag([0, 1, 0, 0]))

    def test_keep_all(self):
        s = maximally_entangled_state(2)
        assert np.allclose(partial_trace(s, [0, 1]).matrix, s.matrix)

    def test_middle_factor(self):
        rho = random_density_matrix(3, 4)
        s = tensor(computational_basis_state(2, 0), rho, computational_basis_state(2, 1))
        assert np.allclose(partial_trace(s, [1]).matrix, rho.matrix, atol=1e-12)

    @pytest.mark.parametrize("keep", [[0], [1], [2], [0, 2], [1, 2]])
    def test_against_index_oracle(self, keep):
        dims = (2, 3, 2)
        rho = random_density_matrix(12, 9).with_dims(dims)
        ref = partial_trace_oracle(rho.matrix, dims, keep)
        assert np.allclose(partial_trace(rho, keep).matrix, ref, atol=1e-12)

    def test_invalid_keep(self):
        with pytest.raises(ValueError):
            partial_trace(maximally_entangled_state(2), [2])
        with pytest.raises(ValueError):
            partial_trace(maximally_entangled_state(2), [0, 0])

    @settings(max_examples=40, deadline=None)
    @given(small_d, small_d, seeds)
    def test_trace_out_second_recovers_first(self, da, db, seed):
        a = random_density_matrix(da, seed)
        b = random_density_matrix(db, seed + 1)
        ab = tensor(a, b)
        assert_valid_state(ab)
        assert np.linalg.norm(partial_trace(ab, [0]).matrix - a.matrix) <= 1e-12
        assert np.linalg.norm(partial_trace(ab, [1]).matrix - b.matrix) <= 1e-12


class TestUnitary:
    def test_identity(self):
        s = random_density_matrix(3, 0)
        assert s.allclose(apply_unitary(s, UnitaryOperator(np.eye(3)), [0]))

    def test_flip(self):
        s = apply_unitary(computational_basis_state(2, 0), weyl_operator(2, 1, 0), [0])
        assert np.allclose(s.matrix, np.diag([0, 1]))

    def test_on_second_factor(self):
        s = tensor(computational_basis_state(2, 0), computational_basis_state(3, 0))
        out = apply_unitary(s, weyl_operator(3, 2, 0), [1])
        ref = tensor(computational_basis_state(2, 0), computational_basis_state(3, 2))
        assert out.allclose(ref)

    def test_noncontiguous_factors_return_in_place(self):
        a, b, c = (random_density_matrix(2, k) for k in range(3))
        u = random_unitary(4, 7)
        out = apply_unitary(tensor(a, b, c), u, [0, 2])
        m = u.matrix @ tensor(a, c).matrix @ u.matrix.conj().T
        ref = QuantumState(m, (2, 2))
        # bring the oracle into (0, 1, 2) order: kron(ref on 0,2) with b on 1
        big = np.kron(ref.matrix, b.matrix).reshape([2, 2, 2] * 2).transpose(0, 2, 1, 3, 5, 4)
        assert np.allclose(out.matrix, big.reshape(8, 8), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_unitary(maximally_mixed_state(2), weyl_operator(3, 1, 0), [0])

    @settings(max_examples=30, deadline=None)
    @given(small_d, seeds)
    def test_spectrum_preserved(self, d, seed):
        s = random_density_matrix(d, seed)
        out = apply_unitary(s, random_unitary(d, seed + 3), [0])
        assert_valid_state(out)
        assert np.allclose(np.linalg.eigvalsh(out.matrix), np.linalg.eigvalsh(s.matrix), atol=1e-12)


class TestEntropy:
    def test_pure(self):
        assert von_neumann_entropy(random_pure_state(3, 1)) == pytest.approx(0, abs=TOL)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_maximally_mixed(self, d):
        assert von_neumann_entropy(maximally_mixed_state(d)) == pytest.approx(np.log2(d), abs=TOL)

    def test_three_quarters(self):
        p = np.array([0.75, 0.25])
        oracle = -np.sum(p * np.log2(p))
        assert oracle == pytest.approx(0.811278124459, abs=1e-12)
        s = QuantumState(np.diag(p), (2,))
        assert von_neumann_entropy(s) == pytest.approx(oracle, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(small_d, small_d, seeds)
    def test_additive(self, da, db, seed):
        a = random_density_matrix(da, seed)
        b = random_density_matrix(db, seed + 11)
        total = von_neumann_entropy(tensor(a, b))
        assert abs(total - von_neumann_entropy(a) - von_neumann_entropy(b)) <= TOL
        assert 0 <= total <= np.log2(da * db) + TOL


class TestFidelity:
    def test_pure_self(self):
        s = random_pure_state(3, 2)
        assert fidelity_with_pure(s, s) == pytest.approx(1, abs=TOL)

    def test_orthogonal(self):
        assert fidelity_with_pure(computational_basis_state(2, 0), computational_basis_state(2, 1)) == 0

    def test_mixed_overlap(self):
        f = fidelity_with_pure(maximally_mixed_state(2), computational_basis_state(2, 0))
        assert f == pytest.approx(0.5, abs=TOL)

    def test_mixed_target_rejected(self):
        with pytest.raises(StateError):
            fidelity_with_pure(computational_basis_state(2, 0), maximally_mixed_state(2))


class TestRandom:
    def test_purity_and_determinism(self):
        s = random_pure_state(4, 42)
        assert abs(s.purity() - 1) <= TOL
        assert np.array_equal(s.matrix, random_pure_state(4, 42).matrix)
        assert not np.array_equal(s.matrix, random_pure_state(4, 43).matrix)

    def test_haar_average(self):
        # first moment of the Haar measure is I/d
        d = 3
        mean = sum(random_pure_state(d, seed).matrix for seed in range(10_000)) / 10_000
        assert np.linalg.norm(mean - np.eye(d) / d) <= 0.05


class TestProjectOutcome:
    def test_classical_register(self):
        rho = random_density_matrix(2, 3)
        mix = QuantumState(
            0.25 * tensor(computational_basis_state(2, 0), rho).matrix
            + 0.75 * tensor(computational_basis_state(2, 1), maximally_mixed_state(2)).matrix,
            (2, 2),
        )
        p0, s0 = project_outcome(mix, 0, 0)
        p1, s1 = project_outcome(mix, 0, 1)
        assert p0 == pytest.approx(0.25) and p1 == pytest.approx(0.75)
        assert np.allclose(s0.matrix, rho.matrix)
        assert np.allclose(s1.matrix, np.eye(2) / 2)

    def test_zero_probability(self):
        s = tensor(computational_basis_state(2, 0), maximally_mixed_state(2))
        p, post = project_outcome(s, 0, 1)
        assert p == 0 and post is None
