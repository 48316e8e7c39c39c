"""SSR-compatible dichotomic observables, outcome statistics and CHSH evaluation.

The principal system carries the entangled state
(|low>|low+delta> + |low+delta>|low>)/sqrt(2) with ``low = 2`` by default.
Each party measures a local observable on (principal, reference) whose
eigenvectors are rotations, by the measurement angle, inside two-dimensional
subspaces of fixed local particle number ``low + a + delta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import ContractError, PreconditionError, SizeError
from .fock import FockCutoff, PureState, Side, State, tensor
from .ssr import coherence_v, fixed_number_coefficients, is_ssr_compliant, is_ssr_locc

CORRELATION_TOL = 1e-10
NULL_TOL = 1e-12
COMPONENT_FLOOR = 1e-14


@dataclass(frozen=True)
class PrincipalState:
    """Entangled principal system shared by Alice (A) and Bob (B).

    With ``coeffs=None`` the state is the two-term superposition used by the
    SSR observables; ``low=0`` gives the single-particle variant (delta=1).
    With ``coeffs`` it is the general form sum_n c_n |n>|N-n>, N = len(coeffs)-1;
    ``delta`` then only selects which observables are built.
    """

    delta: int
    low: int = 2
    coeffs: Optional[tuple] = None

    def __post_init__(self):
        if self.delta < 1:
            raise PreconditionError(f"delta must be >= 1, got {self.delta}")
        if self.low < 0:
            raise PreconditionError(f"low occupation must be >= 0, got {self.low}")

    @classmethod
    def general(cls, coeffs: Sequence[complex], delta: int = 1, low: int = 2) -> "PrincipalState":
        c = np.asarray(coeffs, dtype=complex)
        c = c / np.linalg.norm(c)
        return cls(delta, low, tuple(complex(x) for x in c))

    @classmethod
    def single_particle(cls, delta: int = 1) -> "PrincipalState":
        return cls(delta, low=0)

    @property
    def dim(self) -> int:
        need = self.low + self.delta + 2
        if self.coeffs is not None:
            need = max(need, len(self.coeffs))
        return need

    @property
    def state(self) -> PureState:
        cut = FockCutoff(self.dim, self.dim)
        if self.coeffs is None:
            lo, hi = self.low, self.low + self.delta
            return PureState.from_terms(cut, {(lo, hi): 1.0, (hi, lo): 1.0})
        n_tot = len(self.coeffs) - 1
        return PureState.from_terms(cut, {(n, n_tot - n): c for n, c in enumerate(self.coeffs)})


@dataclass(frozen=True, eq=False)
class SSRObservable:
    """Dichotomic observable; rows of ``eigvecs_plus``/``eigvecs_minus`` are local vectors.

    The local space is (principal, reference) with index ``p * (n_ref + 1) + k``.
    ``labels[i]`` is the index a of the i-th eigenvector pair.
    """

    angle: float
    delta: int
    n_ref: int
    side: Side
    low: int
    dim_principal: int
    labels: np.ndarray
    eigvecs_plus: np.ndarray
    eigvecs_minus: np.ndarray

    @property
    def local_cutoff(self) -> FockCutoff:
        return FockCutoff(self.dim_principal, self.n_ref + 1)

    @property
    def local_dim(self) -> int:
        return self.local_cutoff.dim

    def eigenstates(self) -> tuple[list[PureState], list[PureState]]:
        cut = self.local_cutoff
        return ([PureState(cut, v) for v in self.eigvecs_plus],
                [PureState(cut, v) for v in self.eigvecs_minus])

    def projector(self, outcome: int) -> np.ndarray:
        v = self.eigvecs_plus if outcome > 0 else self.eigvecs_minus
        return v.T @ v.conj()

    def null_projector(self) -> np.ndarray:
        return np.eye(self.local_dim) - self.projector(+1) - self.projector(-1)

    def operator(self, null_value: float = 0.0) -> np.ndarray:
        """P+ - P- + null_value * P_null."""
        op = self.projector(+1) - self.projector(-1)
        if null_value:
            op = op + null_value * self.null_projector()
        return op


def build_observable(angle: float, delta: int, n_ref: int, side: Side = "A",
                     low: int = 2, dim_principal: Optional[int] = None) -> SSRObservable:
    """Three-regime eigenbasis for index a = -delta .. n_ref.

    a < 0 pairs |low-1, a+delta+1> with |low, a+delta>; 0 <= a <= n_ref-delta pairs
    |low+delta, a> with |low, a+delta>; a > n_ref-delta pairs |low+delta, a> with
    |low+delta+1, a-1>. ``low=0`` drops the first regime.
    """
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    if delta < 1:
        raise PreconditionError(f"delta must be >= 1, got {delta}")
    if n_ref < delta:
        raise SizeError(f"reference cutoff too small: need n_ref >= delta = {delta}, got n_ref = {n_ref}")
    need = low + delta + 2
    dim_p = need if dim_principal is None else dim_principal
    if dim_p < need:
        raise SizeError(f"principal cutoff too small: need dimension >= {need} "
                        f"(occupations up to {need - 1}), got {dim_p}")
    vecs = _eigenbasis(float(angle), delta, n_ref, low, dim_p)
    labels, plus, minus = vecs
    return SSRObservable(float(angle), delta, n_ref, side, low, dim_p, labels, plus, minus)


@lru_cache(maxsize=4096)
def _eigenbasis(angle: float, delta: int, n_ref: int, low: int, dim_p: int):
    cut = FockCutoff(dim_p, n_ref + 1)
    c, s = np.cos(angle), np.sin(angle)
    labels, plus, minus = [], [], []
    first = -delta if low >= 1 else 0
    for a in range(first, n_ref + 1):
        if a < 0:
            u, w = (low - 1, a + delta + 1), (low, a + delta)
        elif a <= n_ref - delta:
            u, w = (low + delta, a), (low, a + delta)
        else:
            u, w = (low + delta, a), (low + delta + 1, a - 1)
        eu = np.zeros(cut.dim)
        ew = np.zeros(cut.dim)
        eu[cut.index(*u)] = 1.0
        ew[cut.index(*w)] = 1.0
        labels.append(a)
        plus.append(c * eu + s * ew)
        minus.append(s * eu - c * ew)
    out = (np.array(labels), np.array(plus), np.array(minus))
    for arr in out:
        arr.flags.writeable = False
    return out


def _reference_components(rho_ref: State) -> list[tuple[float, PureState]]:
    if isinstance(rho_ref, PureState):
        return [(1.0, rho_ref)]
    w, v = np.linalg.eigh(rho_ref.mat)
    return [(float(wk), PureState.from_amplitudes(rho_ref.cutoff, v[:, k]))
            for k, wk in enumerate(w) if wk > COMPONENT_FLOOR]


def _check_no_low_reference(rho_ref: State, delta: int) -> None:
    # single-particle variant: the reference may not hold fewer than delta particles on either side
    rho = rho_ref.density()
    n_a, n_b = rho.cutoff.numbers()
    diag = np.diag(rho.mat).real
    bad = diag[(n_a < delta) | (n_b < delta)]
    if bad.size and float(bad.max()) > COMPONENT_FLOOR:
        raise PreconditionError("single-particle principal state requires a reference without "
                                f"vacuum: found weight {float(bad.sum())!r} on local numbers < {delta}")


def expectation_grid(psi: PureState, rho_ref: State, alphas, betas, delta: int,
                     low: int = 2, null_value: Optional[float] = None) -> np.ndarray:
    """Brute-force E[i, j] = <A(alphas[i]) (x) B(betas[j])> on psi (x) rho_ref.

    ``null_value=None`` uses the bare observables and requires the joint state to
    have null-outcome probability below 1e-12; a number completes the observables
    by assigning that value on the null subspace.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    ref_cut = rho_ref.cutoff
    nv = 0.0 if null_value is None else float(null_value)
    obs_a = [build_observable(x, delta, ref_cut.dim_a - 1, "A", low, psi.cutoff.dim_a) for x in alphas]
    obs_b = [build_observable(x, delta, ref_cut.dim_b - 1, "B", low, psi.cutoff.dim_b) for x in betas]
    op_a = np.array([o.operator(nv) for o in obs_a])
    op_b = np.array([o.operator(nv) for o in obs_b])
    support_a = obs_a[0].projector(+1) + obs_a[0].projector(-1)
    support_b = obs_b[0].projector(+1) + obs_b[0].projector(-1)

    grid = np.zeros((alphas.size, betas.size))
    p_null = 0.0
    for w, phi in _reference_components(rho_ref):
        m = tensor(psi, phi).matrix()
        x = np.einsum("ab,iac,cd->ibd", m.conj(), op_a, m)
        grid += w * np.einsum("ipq,jpq->ij", x, op_b).real
        if null_value is None:
            p_null += w * (1.0 - float(np.vdot(m, support_a @ m @ support_b.T).real))
    if null_value is None and p_null > NULL_TOL:
        raise ContractError(f"joint state has null-outcome probability {p_null!r} > {NULL_TOL}; "
                            "the observables do not cover this principal/reference pair")
    return grid


def correlation_closed_form(alpha: float, beta: float, v: float) -> float:
    return -np.cos(2 * alpha) * np.cos(2 * beta) + v * np.sin(2 * alpha) * np.sin(2 * beta)


def _check_pair(psi: PrincipalState, rho_ref: State) -> None:
    if psi.coeffs is not None:
        raise PreconditionError("closed-form correlation needs the two-term principal state, not general coefficients")
    if not is_ssr_compliant(rho_ref):
        raise PreconditionError("reference state is not SSR-compliant")
    if psi.low == 0:
        _check_no_low_reference(rho_ref, psi.delta)


def correlation_brute_force(psi: PrincipalState, rho_ref: State, alpha: float, beta: float) -> float:
    _check_pair(psi, rho_ref)
    return float(expectation_grid(psi.state, rho_ref, [alpha], [beta], psi.delta, psi.low)[0, 0])


def correlation(psi: PrincipalState, rho_ref: State, alpha: float, beta: float) -> float:
    """E(alpha, beta); the brute-force value must match -cos2a cos2b + V sin2a sin2b."""
    brute = correlation_brute_force(psi, rho_ref, alpha, beta)
    closed = correlation_closed_form(alpha, beta, coherence_v(rho_ref, psi.delta))
    if abs(brute - closed) > CORRELATION_TOL:
        raise ContractError(f"correlation routes disagree: brute force {brute!r}, closed form {closed!r}")
    return brute


@dataclass(frozen=True)
class ProbabilityTable:
    """P[a + delta, s_a, b + delta, s_b]; outcome axis 0 is +1 and 1 is -1."""

    delta: int
    n_ref: int
    probs: np.ndarray

    @property
    def labels(self) -> np.ndarray:
        return np.arange(-self.delta, self.n_ref + 1)

    def total(self) -> float:
        return float(self.probs.sum())

    def correlation(self) -> float:
        sign = np.array([1.0, -1.0])
        return float(np.einsum("asbt,s,t->", self.probs, sign, sign))


def _fixed_reference(phi_ref: PureState, delta: int) -> tuple[int, np.ndarray]:
    n_ref, r = fixed_number_coefficients(phi_ref)
    if n_ref < delta:
        raise SizeError(f"reference holds N' = {n_ref} particles, need N' >= delta = {delta}")
    return n_ref, r


def outcome_probabilities(psi: PrincipalState, phi_ref: PureState, alpha: float, beta: float) -> ProbabilityTable:
    """Outcome table from the closed-form amplitudes; nonzero only on b = N' - a - delta."""
    if psi.coeffs is not None:
        raise PreconditionError("probability table needs the two-term principal state")
    d = psi.delta
    n_ref, r = _fixed_reference(phi_ref, d)
    size = n_ref + d + 1
    probs = np.zeros((size, 2, size, 2))
    ca, sa, cb, sb = np.cos(alpha), np.sin(alpha), np.cos(beta), np.sin(beta)

    def coeff(i):
        return r[i] if 0 <= i <= n_ref else 0.0

    for a in range(-d, n_ref + 1):
        b = n_ref - a - d
        x, y = coeff(a + d), coeff(a)
        amps = np.array([[x * sa * cb + y * ca * sb, x * sa * sb - y * ca * cb],
                         [-x * ca * cb + y * sa * sb, -x * ca * sb - y * sa * cb]])
        probs[a + d, :, b + d, :] = 0.5 * np.abs(amps) ** 2
    return ProbabilityTable(d, n_ref, probs)


def brute_force_probabilities(psi: PrincipalState, phi_ref: PureState, alpha: float, beta: float) -> ProbabilityTable:
    """Same table by projecting the assembled joint state onto eigenvector pairs."""
    d = psi.delta
    n_ref, r = _fixed_reference(phi_ref, d)
    ref = PureState.from_terms(FockCutoff(n_ref + 1, n_ref + 1), {(i, n_ref - i): r[i] for i in range(n_ref + 1)})
    m = tensor(psi.state, ref).matrix()
    oa = build_observable(alpha, d, n_ref, "A", psi.low, psi.dim)
    ob = build_observable(beta, d, n_ref, "B", psi.low, psi.dim)
    size = n_ref + d + 1
    probs = np.zeros((size, 2, size, 2))
    for s, va in enumerate((oa.eigvecs_plus, oa.eigvecs_minus)):
        for t, vb in enumerate((ob.eigvecs_plus, ob.eigvecs_minus)):
            amp = va.conj() @ m @ vb.conj().T
            probs[np.ix_(oa.labels + d, [s], ob.labels + d, [t])] = (np.abs(amp) ** 2)[:, None, :, None]
    return ProbabilityTable(d, n_ref, probs)


@dataclass(frozen=True)
class CHSHSettings:
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if not all(np.isfinite([self.alpha1, self.alpha2, self.beta1, self.beta2])):
            raise ValueError("CHSH angles must be finite")


def chsh_from_grid(e: np.ndarray) -> float:
    """S from a 2x2 table E[k, l] = E(alpha_k, beta_l)."""
    return float(e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1])


def chsh(psi: PrincipalState, rho_ref: State, settings: CHSHSettings) -> float:
    _check_pair(psi, rho_ref)
    alphas = [settings.alpha1, settings.alpha2]
    betas = [settings.beta1, settings.beta2]
    e = expectation_grid(psi.state, rho_ref, alphas, betas, psi.delta, psi.low)
    v = coherence_v(rho_ref, psi.delta)
    closed = correlation_closed_form(np.array(alphas)[:, None], np.array(betas)[None, :], v)
    err = float(np.max(np.abs(e - closed)))
    if err > CORRELATION_TOL:
        raise ContractError(f"correlation routes disagree by {err!r} at settings {settings}")
    return chsh_from_grid(e)


@dataclass(frozen=True)
class CHSHOptimum:
    s_max: float
    settings: CHSHSettings


def chsh_optimal(v: float) -> CHSHOptimum:
    """2 sqrt(1 + v^2) at alpha1 = 0, alpha2 = pi/4, beta1 = -beta2 = beta."""
    if not abs(v) <= 1.0:
        raise PreconditionError(f"coherence parameter must satisfy |v| <= 1, got {v!r}")
    beta = 0.5 * np.arctan2(2.0 * v, -2.0)
    return CHSHOptimum(float(2.0 * np.sqrt(1.0 + v * v)), CHSHSettings(0.0, np.pi / 4, float(beta), float(-beta)))


def max_abs_chsh_on_grid(e: np.ndarray) -> float:
    """max |S| over all (alpha1, alpha2, beta1, beta2) drawn from the grid rows/columns of E."""
    s = e[:, None, :, None] + e[:, None, None, :] + e[None, :, :, None] - e[None, :, None, :]
    return float(np.max(np.abs(s)))


def _random_ssr_basis(cutoff: FockCutoff, rng: np.random.Generator) -> np.ndarray:
    """Unitary (columns = measurement basis) block-diagonal in local total number."""
    n_p, n_r = cutoff.numbers()
    tot = n_p + n_r
    u = np.zeros((cutoff.dim, cutoff.dim), dtype=complex)
    for t in np.unique(tot):
        idx = np.flatnonzero(tot == t)
        block = np.ones((1, 1)) if idx.size == 1 else unitary_group.rvs(idx.size, random_state=rng)
        if idx.size == 1:
            block = block * np.exp(2j * np.pi * rng.random())
        u[np.ix_(idx, idx)] = block
    return u


def ssr_locc_lhv_check(psi: PrincipalState, ref: State, seed: int = 0, trials: int = 1,
                       tol: float = CORRELATION_TOL) -> bool:
    """Compare full outcome statistics of random SSR local measurements on the coherent
    joint state and on its locally dephased separable mixture."""
    rho = ref.density()
    if not is_ssr_locc(rho):
        raise PreconditionError("reference is not SSR-LOCC (not diagonal in the product number basis)")
    state = psi.state
    cut_a = FockCutoff(state.cutoff.dim_a, rho.cutoff.dim_a)
    cut_b = FockCutoff(state.cutoff.dim_b, rho.cutoff.dim_b)
    weights = np.diag(rho.mat).real.reshape(rho.cutoff.dim_a, rho.cutoff.dim_b)
    cm = state.matrix()
    terms = [(k, l, weights[k, l]) for k in range(weights.shape[0]) for l in range(weights.shape[1])
             if weights[k, l] > COMPONENT_FLOOR]
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        u = _random_ssr_basis(cut_a, rng)
        v = _random_ssr_basis(cut_b, rng)
        coherent = np.zeros((cut_a.dim, cut_b.dim))
        dephased = np.zeros((cut_a.dim, cut_b.dim))
        for k, l, p in terms:
            m = tensor(state, PureState.basis(rho.cutoff, k, l)).matrix()
            coherent += p * np.abs(u.conj().T @ m @ v.conj()) ** 2
            for n_a, n_b in zip(*np.nonzero(np.abs(cm) > 0)):
                pa = np.abs(u[cut_a.index(n_a, k), :]) ** 2
                pb = np.abs(v[cut_b.index(n_b, l), :]) ** 2
                dephased += p * abs(cm[n_a, n_b]) ** 2 * np.outer(pa, pb)
        if float(np.max(np.abs(coherent - dephased))) > tol:
            return False
    return True
