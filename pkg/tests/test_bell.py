import numpy as np
import pytest
from hypothesis import given, strategies as st

from ssrbell.bell import (CHSHSettings, PrincipalState, brute_force_probabilities, build_observable, chsh,
                          chsh_optimal, correlation, correlation_brute_force, correlation_closed_form,
                          expectation_grid, max_abs_chsh_on_grid, outcome_probabilities, ssr_locc_lhv_check)
from ssrbell.errors import ContractError, PreconditionError, SizeError
from ssrbell.fock import DensityOperator, FockCutoff, PureState, random_density
from ssrbell.ssr import coherence_v, twirl_global

C22 = FockCutoff(2, 2)
BELL_REF = PureState.from_terms(C22, {(0, 1): 1, (1, 0): 1})
seeds = st.integers(0, 2 ** 32 - 1)


def fixed_ref(r):
    n = len(r) - 1
    return PureState.from_terms(FockCutoff(n + 1, n + 1), {(i, n - i): c for i, c in enumerate(r)})


def random_fixed_ref(rng, n):
    r = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return fixed_ref(r / np.linalg.norm(r))


def kron_oracle(alpha, beta):
    """<A(alpha) (x) B(beta)> for delta=1, N'=1 and the Bell reference, from hand-listed kets."""
    dp, dr = 5, 2

    def ket(p, k):
        return np.kron(np.eye(dp)[p], np.eye(dr)[k])

    pairs = [((1, 1), (2, 0)), ((3, 0), (2, 1)), ((3, 1), (4, 0))]

    def obs(x):
        op = np.zeros((dp * dr, dp * dr))
        for u, w in pairs:
            plus = np.cos(x) * ket(*u) + np.sin(x) * ket(*w)
            minus = np.sin(x) * ket(*u) - np.cos(x) * ket(*w)
            op += np.outer(plus, plus) - np.outer(minus, minus)
        return op

    psi = np.zeros((dp, dp))
    psi[2, 3] = psi[3, 2] = 1 / np.sqrt(2)
    ref = np.zeros((dr, dr))
    ref[0, 1] = ref[1, 0] = 1 / np.sqrt(2)
    joint = np.einsum("ab,cd->acbd", psi, ref).reshape(-1)  # (A, A', B, B')
    return joint @ np.kron(obs(alpha), obs(beta)) @ joint


def test_brute_force_matches_kron_oracle(rng):
    psi = PrincipalState(1)
    for alpha, beta in rng.uniform(-np.pi, np.pi, size=(5, 2)):
        assert abs(correlation_brute_force(psi, BELL_REF, alpha, beta) - kron_oracle(alpha, beta)) < 1e-13
    assert abs(kron_oracle(np.pi / 4, np.pi / 4) - 0.5) < 1e-13


@given(st.floats(-np.pi, np.pi), st.integers(1, 3), st.integers(0, 5))
def test_observable_structure(angle, delta, extra):
    n_ref = delta + extra
    o = build_observable(angle, delta, n_ref)
    vecs = np.vstack([o.eigvecs_plus, o.eigvecs_minus])
    assert len(o.eigvecs_plus) == len(o.eigvecs_minus) == n_ref + delta + 1
    np.testing.assert_allclose(vecs @ vecs.conj().T, np.eye(len(vecs)), atol=1e-12)
    n_p, n_r = o.local_cutoff.numbers()
    for a, vp, vm in zip(o.labels, o.eigvecs_plus, o.eigvecs_minus):
        for v in (vp, vm):
            totals = np.unique((n_p + n_r)[np.abs(v) > 1e-15])
            assert totals.tolist() in ([2 + a + delta], [])
    p = o.projector(1) + o.projector(-1) + o.null_projector()
    np.testing.assert_allclose(p, np.eye(o.local_dim), atol=1e-12)


def test_observable_examples():
    o = build_observable(0.0, 1, 1)
    assert len(o.eigvecs_plus) + len(o.eigvecs_minus) == 6
    cut = o.local_cutoff
    i = list(o.labels).index(0)  # regime 2
    np.testing.assert_array_equal(o.eigvecs_plus[i], np.eye(cut.dim)[cut.index(3, 0)])
    np.testing.assert_array_equal(o.eigvecs_minus[i], -np.eye(cut.dim)[cut.index(2, 1)])
    q = build_observable(np.pi / 2, 1, 1)
    np.testing.assert_allclose(q.eigvecs_plus[i], np.eye(cut.dim)[cut.index(2, 1)], atol=1e-15)
    np.testing.assert_allclose(q.eigvecs_minus[i], np.eye(cut.dim)[cut.index(3, 0)], atol=1e-15)
    s0, s1 = o.eigenstates()
    assert len(s0) == len(s1) == 3


def test_observable_size_errors():
    with pytest.raises(SizeError, match="need dimension >= 5"):
        build_observable(0.0, 1, 1, dim_principal=4)
    with pytest.raises(SizeError):
        build_observable(0.0, 2, 1)
    with pytest.raises(PreconditionError):
        build_observable(0.0, 0, 1)


def test_probability_examples():
    psi = PrincipalState(1)
    t = outcome_probabilities(psi, BELL_REF, np.pi / 4, np.pi / 4)
    d = 1
    # a = 0 pairs with b = N' - a - delta = 0
    assert abs(t.probs[0 + d, 0, 0 + d, 0] - 0.25) < 1e-15
    assert abs(t.total() - 1) < 1e-12
    for ai in range(t.probs.shape[0]):
        nonzero = {bi for bi in range(t.probs.shape[2]) if t.probs[ai, :, bi, :].sum() > 1e-15}
        assert len(nonzero) <= 1
    t0 = outcome_probabilities(psi, BELL_REF, 0.0, 0.0)
    # at alpha = beta = 0 only the anti-correlated outcomes survive: each is |r|^2 / 2
    assert abs(t0.probs[0 + d, 1, 0 + d, 0] - 0.25) < 1e-15
    assert abs(t0.probs[1 + d, 0, -1 + d, 1] - 0.25) < 1e-15
    assert abs(t0.total() - 1) < 1e-12


@given(seeds, st.integers(1, 3), st.integers(0, 3))
def test_probability_tables_agree(seed, delta, extra):
    rng = np.random.default_rng(seed)
    ref = random_fixed_ref(rng, delta + extra)
    psi = PrincipalState(delta)
    alpha, beta = rng.uniform(-np.pi, np.pi, size=2)
    t = outcome_probabilities(psi, ref, alpha, beta)
    b = brute_force_probabilities(psi, ref, alpha, beta)
    np.testing.assert_allclose(t.probs, b.probs, atol=1e-12)
    assert (t.probs >= 0).all() and abs(t.total() - 1) < 1e-12
    assert abs(t.correlation() - correlation(psi, ref, alpha, beta)) < 1e-10


def test_probabilities_reject_bad_reference():
    with pytest.raises(PreconditionError):
        outcome_probabilities(PrincipalState(1), PureState.from_terms(C22, {(0, 0): 1, (1, 1): 1}), 0, 0)
    with pytest.raises(SizeError):
        outcome_probabilities(PrincipalState(2), BELL_REF, 0, 0)


def test_correlation_examples(rng):
    psi = PrincipalState(1)
    for beta in rng.uniform(-np.pi, np.pi, size=4):
        assert abs(correlation(psi, BELL_REF, 0.0, beta) + np.cos(2 * beta)) < 1e-12
    locc = DensityOperator.diagonal(np.array([[0.1, 0.3], [0.4, 0.2]]))
    for alpha, beta in rng.uniform(-np.pi, np.pi, size=(4, 2)):
        got = correlation(psi, locc, alpha, beta)
        assert abs(got + np.cos(2 * alpha) * np.cos(2 * beta)) < 1e-12
    assert abs(correlation(psi, BELL_REF, np.pi / 4, np.pi / 4) - 0.5) < 1e-12


def test_correlation_mixed_references(rng):
    psi = PrincipalState(2)
    for _ in range(5):
        rho = twirl_global(random_density(FockCutoff(4, 4), rng))
        v = coherence_v(rho, 2)
        for alpha, beta in rng.uniform(-np.pi, np.pi, size=(3, 2)):
            assert abs(correlation(psi, rho, alpha, beta) - correlation_closed_form(alpha, beta, v)) < 1e-10


def test_correlation_rejects_non_ssr_reference(rng):
    with pytest.raises(PreconditionError):
        correlation(PrincipalState(1), random_density(FockCutoff(3, 3), rng), 0.1, 0.2)
    with pytest.raises(PreconditionError):
        correlation(PrincipalState.general([1, 1]), BELL_REF, 0.1, 0.2)


def test_null_outcome_contract():
    psi = PureState.from_terms(FockCutoff(5, 5), {(0, 3): 1})
    with pytest.raises(ContractError, match="null-outcome"):
        expectation_grid(psi, BELL_REF, [0.1], [0.2], 1)
    e = expectation_grid(psi, BELL_REF, [0.1], [0.2], 1, null_value=1.0)
    assert abs(e[0, 0]) <= 1 + 1e-12


def test_single_particle_variant(rng):
    psi = PrincipalState.single_particle(1)
    ref = PureState.from_terms(FockCutoff(3, 3), {(1, 2): 1, (2, 1): 1})
    v = coherence_v(ref, 1)
    assert abs(v - 0.5) < 1e-15
    for alpha, beta in rng.uniform(-np.pi, np.pi, size=(5, 2)):
        got = correlation_brute_force(psi, ref, alpha, beta)
        assert abs(got - correlation_closed_form(alpha, beta, v)) < 1e-10
    with pytest.raises(PreconditionError, match="vacuum"):
        correlation_brute_force(psi, BELL_REF, 0.1, 0.2)


def test_chsh_examples():
    psi = PrincipalState(1)
    for beta in (0.1, 0.7, -1.2):
        s = chsh(psi, BELL_REF, CHSHSettings(0.0, np.pi / 4, beta, -beta))
        assert abs(s - (-2 * np.cos(2 * beta) + 2 * 0.5 * np.sin(2 * beta))) < 1e-12
    opt = chsh_optimal(0.5)
    assert abs(opt.s_max - 2.23607) < 1e-5
    assert abs(chsh(psi, BELL_REF, opt.settings) - opt.s_max) < 1e-10
    assert chsh_optimal(0.0).s_max == 2.0
    assert abs(chsh_optimal(1.0).s_max - 2 * np.sqrt(2)) < 1e-15
    assert abs(chsh_optimal(0.25).s_max - 2.06155) < 1e-5
    assert abs(chsh_optimal(0.25).s_max - 2 * np.sqrt(17) / 4) < 1e-15
    with pytest.raises(PreconditionError):
        chsh_optimal(1.01)
    with pytest.raises(ValueError):
        CHSHSettings(0.0, np.inf, 0.0, 0.0)


def test_chsh_optimal_settings_point_along_w():
    for v in (-0.8, -0.1, 0.3, 1.0):
        b = chsh_optimal(v).settings.beta1
        w = np.array([-2.0, 2.0 * v])
        u = np.array([np.cos(2 * b), np.sin(2 * b)])
        assert abs(u @ w - np.linalg.norm(w)) < 1e-12


def test_chsh_monotone_and_threshold():
    vs = np.linspace(0, 1, 101)
    s = np.array([chsh_optimal(v).s_max for v in vs])
    assert (np.diff(s) > 0).all()
    assert s[0] == 2.0 and (s[1:] > 2).all()
    assert chsh_optimal(-0.3).s_max == chsh_optimal(0.3).s_max


@given(seeds, st.integers(1, 3), st.integers(0, 3))
def test_chsh_at_optimum_matches_closed_form(seed, delta, extra):
    rng = np.random.default_rng(seed)
    ref = random_fixed_ref(rng, delta + extra)
    v = coherence_v(ref, delta)
    opt = chsh_optimal(v)
    assert abs(chsh(PrincipalState(delta), ref, opt.settings) - opt.s_max) < 1e-10


def test_zero_v_reference_never_violates():
    grid = np.linspace(0, np.pi, 9)
    locc = DensityOperator.diagonal(np.array([[0.5, 0.0], [0.25, 0.25]]))
    e = expectation_grid(PrincipalState(1).state, locc, grid, grid, 1)
    assert max_abs_chsh_on_grid(e) <= 2 + 1e-9


def test_lhv_check_examples(rng):
    psi = PrincipalState.general([1, 1])
    assert ssr_locc_lhv_check(psi, PureState.basis(C22, 0, 0).density(), seed=3, trials=5)
    with pytest.raises(PreconditionError):
        ssr_locc_lhv_check(psi, BELL_REF)
    w = rng.random((2, 3))
    ref = DensityOperator.diagonal(w / w.sum())
    assert ssr_locc_lhv_check(PrincipalState.general([0.6, 0.0, 0.8j]), ref, seed=11, trials=5)


def test_lhv_check_detects_coherent_reference_statistics():
    # the coherent and dephased tables differ once the reference carries coherence: check via a
    # reference whose diagonal matches the Bell reference but which we feed unchecked
    psi = PrincipalState(1)
    diag = DensityOperator.diagonal(np.array([[0.0, 0.5], [0.5, 0.0]]))
    grid = [np.pi / 4]
    coherent = expectation_grid(psi.state, BELL_REF, grid, grid, 1)[0, 0]
    dephased = expectation_grid(psi.state, diag, grid, grid, 1)[0, 0]
    assert abs(coherent - dephased - 0.5) < 1e-12
