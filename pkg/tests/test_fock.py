import numpy as np
import pytest
from hypothesis import given, strategies as st

from ssrbell.errors import SizeError, StateValidationError
from ssrbell.fock import (DensityOperator, FockCutoff, LocalOperator, PureState, partial_trace, partial_transpose,
                          random_density, random_pure, tensor, total_number_projector)

C22 = FockCutoff(2, 2)


def bell01():
    return PureState.from_terms(C22, {(0, 1): 1, (1, 0): 1})


def test_cutoff_rejects_empty():
    with pytest.raises(SizeError):
        FockCutoff(0, 3)


def test_pure_state_requires_normalization():
    with pytest.raises(StateValidationError):
        PureState(C22, [1, 1, 0, 0])


def test_density_rejects_bad_trace():
    with pytest.raises(StateValidationError, match="trace"):
        DensityOperator(C22, 0.9 * np.eye(4) / 4)


def test_density_rejects_non_hermitian():
    m = np.eye(4) / 4
    m = m.astype(complex)
    m[0, 1] = 0.1
    with pytest.raises(StateValidationError, match="Hermitian"):
        DensityOperator(C22, m)


def test_density_rejects_negative():
    with pytest.raises(StateValidationError, match="positive"):
        DensityOperator(C22, np.diag([1.5, -0.5, 0, 0]))


def test_values_are_immutable():
    s = bell01()
    with pytest.raises(ValueError):
        s.amps[0] = 1


def test_tensor_basis_case():
    x = PureState.basis(C22, 0, 1)
    y = PureState.basis(C22, 1, 0)
    z = tensor(x, y)
    # Alice holds (A, A') = (0, 1) -> index 1; Bob holds (B, B') = (1, 0) -> index 2
    expected = np.zeros(16)
    expected[1 * 4 + 2] = 1
    assert z.cutoff == FockCutoff(4, 4)
    np.testing.assert_array_equal(z.amps, expected)


def test_tensor_norm_and_trace(rng):
    a, b = random_pure(FockCutoff(2, 3), rng), random_pure(FockCutoff(3, 2), rng)
    assert abs(np.linalg.norm(tensor(a, b).amps) - 1) < 1e-12
    r, s = random_density(FockCutoff(2, 3), rng), random_density(FockCutoff(2, 2), rng)
    assert abs(np.trace(tensor(r, s).mat) - 1) < 1e-12


def test_tensor_size_limit(rng):
    a = random_pure(FockCutoff(10, 10), rng)
    with pytest.raises(SizeError):
        tensor(a, a)
    with pytest.raises(TypeError):
        tensor(a, a.density())


def test_tensor_density_matches_pure(rng):
    a, b = random_pure(FockCutoff(2, 3), rng), random_pure(FockCutoff(3, 2), rng)
    np.testing.assert_allclose(tensor(a.density(), b.density()).mat, tensor(a, b).density().mat, atol=1e-14)


def test_partial_trace_examples():
    prod = PureState.basis(C22, 0, 1).density()
    np.testing.assert_allclose(partial_trace(prod, "B").mat, np.diag([1, 0]))
    np.testing.assert_allclose(partial_trace(prod, "A").mat, np.diag([0, 1]))
    np.testing.assert_allclose(partial_trace(bell01(), "B").mat, np.eye(2) / 2, atol=1e-15)
    assert isinstance(partial_trace(prod), LocalOperator)


def test_partial_trace_preserves_trace(rng):
    for _ in range(20):
        rho = random_density(FockCutoff(*rng.integers(1, 5, size=2)), rng)
        assert abs(np.trace(partial_trace(rho, "A").mat) - 1) < 1e-12
        assert abs(np.trace(partial_trace(rho, "B").mat) - 1) < 1e-12


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_partial_trace_of_tensor_recovers_factor(a1, b1, a2, b2, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(FockCutoff(a1, b1), rng)
    sigma = random_density(FockCutoff(a2, b2), rng)
    joint = tensor(rho, sigma)
    # tracing Bob's (B, B') leaves Alice's (A, A'): compare with the marginal product
    expected = np.kron(partial_trace(rho, "B").mat, partial_trace(sigma, "B").mat)
    np.testing.assert_allclose(partial_trace(joint, "B").mat, expected, atol=1e-12)
    # with a trivial second factor the first is recovered exactly
    unit = DensityOperator(FockCutoff(1, 1), np.ones((1, 1)))
    np.testing.assert_allclose(tensor(rho, unit).mat, rho.mat, atol=1e-15)


def test_partial_transpose_examples(rng):
    diag = DensityOperator(C22, np.diag([0.1, 0.2, 0.3, 0.4]))
    np.testing.assert_array_equal(partial_transpose(diag), diag.mat)
    # hand-built partial transpose of (|01> + |10>)(<01| + <10|)/2 on B
    oracle = np.zeros((4, 4))
    oracle[1, 1] = oracle[2, 2] = 0.5
    oracle[0, 3] = oracle[3, 0] = 0.5
    pt = partial_transpose(bell01())
    np.testing.assert_allclose(pt, oracle, atol=1e-15)
    assert abs(np.linalg.eigvalsh(pt)[0] + 0.5) < 1e-12
    rho = random_density(FockCutoff(2, 3), rng)
    once = partial_transpose(rho)
    np.testing.assert_array_equal(partial_transpose(once, cutoff=rho.cutoff), rho.mat)
    with pytest.raises(ValueError):
        partial_transpose(once)
    # product-state oracle: transpose acts on Bob's factor only
    ra, rb = random_density(FockCutoff(2, 1), rng), random_density(FockCutoff(1, 3), rng)
    prod = DensityOperator(FockCutoff(2, 3), np.kron(ra.mat, rb.mat))
    np.testing.assert_allclose(partial_transpose(prod), np.kron(ra.mat, rb.mat.T), atol=1e-14)
    pta = partial_transpose(rho, "A")
    np.testing.assert_allclose(pta, pta.conj().T, atol=1e-14)


def test_number_projectors():
    cut = FockCutoff(3, 2)
    p0 = total_number_projector(0, cut)
    assert p0[0, 0] == 1 and p0.sum() == 1
    ps = [total_number_projector(n, cut) for n in range(cut.dim_a + cut.dim_b - 1)]
    np.testing.assert_array_equal(sum(ps), np.eye(cut.dim))
    for i, p in enumerate(ps):
        for j, q in enumerate(ps):
            np.testing.assert_array_equal(p @ q, p if i == j else 0 * p)
    assert not total_number_projector(10, cut).any()
