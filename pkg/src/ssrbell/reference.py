"""Reference-frame families: the two-particle minimal family and optimal product references."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize_scalar

from .errors import ContractError, StateValidationError
from .fock import DensityOperator, FockCutoff, PureState, min_partial_transpose_eigenvalue
from .ssr import twirl_global

PARAM_TOL = 1e-12
PPT_TOL = 1e-10
EIGEN_TOL = 1e-12


@dataclass(frozen=True)
class MinimalReference:
    """p00 |00><00| + p11 |11><11| + p_phi |phi><phi|, |phi> = r0 |0,1> + r1 |1,0>."""

    p00: float
    p11: float
    p_phi: float
    r0: float
    r1: float

    def __post_init__(self):
        for name in ("p00", "p11", "p_phi", "r0", "r1"):
            object.__setattr__(self, name, float(getattr(self, name)))
        ps = (self.p00, self.p11, self.p_phi)
        if min(ps) < 0 or abs(sum(ps) - 1.0) > PARAM_TOL:
            raise StateValidationError(f"weights must be nonnegative and sum to 1, got {ps}")
        if abs(self.r0 ** 2 + self.r1 ** 2 - 1.0) > PARAM_TOL:
            raise StateValidationError(f"r0^2 + r1^2 must be 1, got {self.r0 ** 2 + self.r1 ** 2!r}")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "MinimalReference":
        p = rng.dirichlet(np.ones(3))
        theta = rng.uniform(0.0, 2 * np.pi)
        return cls(float(p[0]), float(p[1]), float(1.0 - p[0] - p[1]), float(np.cos(theta)), float(np.sin(theta)))

    @property
    def v(self) -> float:
        return self.p_phi * self.r0 * self.r1


def minimal_to_density(m: MinimalReference) -> DensityOperator:
    cut = FockCutoff(2, 2)
    phi = PureState.from_terms(cut, {(0, 1): m.r0, (1, 0): m.r1}, normalize=False)
    mat = (m.p00 * PureState.basis(cut, 0, 0).density().mat
           + m.p11 * PureState.basis(cut, 1, 1).density().mat
           + m.p_phi * phi.density().mat)
    return DensityOperator(cut, mat)


def is_separable_minimal(m: MinimalReference) -> bool:
    """p00 p11 >= V^2, checked against the partial-transpose spectrum."""
    analytic = m.p00 * m.p11 - m.v ** 2 >= -PARAM_TOL
    numeric = min_partial_transpose_eigenvalue(minimal_to_density(m)) >= -PPT_TOL
    if analytic != numeric:
        raise ContractError(f"separability criteria disagree for {m}: analytic {analytic}, PPT {numeric}")
    return analytic


def _golden_max(f, lo: float, hi: float) -> float:
    res = minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x)


@dataclass(frozen=True)
class MinimalOptimum:
    v_max: float
    witness: MinimalReference


def max_v_separable_minimal(grid_step: float = 1e-3) -> MinimalOptimum:
    """Largest V = p_phi r0 r1 over separable members of the minimal family.

    For fixed p_phi the attainable |V| runs continuously from 0 to
    p_phi * max(r0 r1) and the constraint caps it at sqrt(max p00 p11); both
    inner maxima are found numerically, p_phi by grid and bounded refinement.
    """
    theta_star = _golden_max(lambda t: np.cos(t) * np.sin(t), 0.0, np.pi / 2)
    rr_max = np.cos(theta_star) * np.sin(theta_star)

    def best_v(p_phi):
        rest = 1.0 - p_phi
        split = _golden_max(lambda s: (s * rest) * ((1 - s) * rest), 0.0, 1.0)
        cap = np.sqrt(max(split * rest * (1 - split) * rest, 0.0))
        return min(p_phi * rr_max, cap)

    grid = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
    values = np.array([best_v(p) for p in grid])
    i = int(np.argmax(values))  # first index, so ties go to smaller p_phi
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    p_star = _golden_max(best_v, lo, hi)
    if best_v(p_star) < values[i]:
        p_star = float(grid[i])
    v = best_v(p_star)
    # realize V with p00 = p11 and r0 r1 = V / p_phi
    rest = 1.0 - p_star
    rr = min(v / p_star, 0.5)
    theta = 0.5 * np.arcsin(2 * rr)
    witness = MinimalReference(rest / 2, rest / 2, p_star, float(np.cos(theta)), float(np.sin(theta)))
    return MinimalOptimum(float(v), witness)


@dataclass(frozen=True)
class ProductReference:
    """Real product state |a'>|b'> with a' over 0..N and b' over 0..M particles."""

    a_coeffs: tuple
    b_coeffs: tuple

    def __post_init__(self):
        for name, c in (("a_coeffs", self.a_coeffs), ("b_coeffs", self.b_coeffs)):
            norm = float(np.sum(np.square(c)))
            if abs(norm - 1.0) > PARAM_TOL:
                raise StateValidationError(f"{name} not normalized: squared norm {norm!r}")

    @property
    def n(self) -> int:
        return len(self.a_coeffs) - 1

    @property
    def m(self) -> int:
        return len(self.b_coeffs) - 1

    def state(self, dim_a: Optional[int] = None, dim_b: Optional[int] = None) -> PureState:
        a = np.zeros(dim_a or len(self.a_coeffs))
        b = np.zeros(dim_b or len(self.b_coeffs))
        a[: len(self.a_coeffs)] = self.a_coeffs
        b[: len(self.b_coeffs)] = self.b_coeffs
        return PureState.product(a, b)


def optimal_amplitudes(n: int) -> np.ndarray:
    k = np.arange(n + 1)
    return np.sqrt(2.0 / (n + 2)) * np.sin(np.pi * (k + 1) / (n + 2))


def max_shift_expectation(n: int) -> float:
    """cos(pi / (n + 2)): the largest <a'|R+|a'> over real states on 0..n particles."""
    return float(np.cos(np.pi / (n + 2)))


def shift_matrix_top_eigen(n: int) -> tuple[float, np.ndarray]:
    """Top eigenpair of R+ + R- on n + 1 levels (ones on both off-diagonals)."""
    if n == 0:
        return 0.0, np.ones(1)
    w, v = eigh_tridiagonal(np.zeros(n + 1), np.ones(n), select="i", select_range=(n, n))
    vec = v[:, 0]
    return float(w[0]), vec * np.sign(vec[0])


@dataclass(frozen=True)
class ProductOptimum:
    ref: ProductReference
    v: float


def optimal_product_reference(n: int, m: int) -> ProductOptimum:
    if n < 1 or m < 1:
        raise ValueError(f"N and M must be >= 1, got ({n}, {m})")
    f = max_shift_expectation(n)
    g = max_shift_expectation(m)
    for size, closed in ((n, f), (m, g)):
        lam, _ = shift_matrix_top_eigen(size)
        if abs(lam / 2 - closed) > EIGEN_TOL:
            raise ContractError(f"closed-form maximum {closed!r} disagrees with eigensolver {lam / 2!r} at N={size}")
    ref = ProductReference(tuple(optimal_amplitudes(n)), tuple(optimal_amplitudes(m)))
    return ProductOptimum(ref, f * g)


def separable_ssr_reference(ref: ProductReference,
                            mixing: Sequence[tuple[float, ProductReference]] = ()) -> DensityOperator:
    """Globally twirled separable mixture.

    ``ref`` carries weight 1 - sum of the ``mixing`` weights. All components
    are zero-padded to the largest N and M present.
    """
    comps = list(mixing)
    rest = 1.0 - sum(w for w, _ in comps)
    if rest < -PARAM_TOL or any(w < 0 for w, _ in comps):
        raise ValueError("mixing weights must be nonnegative and sum to at most 1")
    comps = [(max(rest, 0.0), ref)] + comps
    da = max(len(r.a_coeffs) for _, r in comps)
    db = max(len(r.b_coeffs) for _, r in comps)
    rho = DensityOperator.mixture([w for w, _ in comps], [r.state(da, db) for _, r in comps])
    return twirl_global(rho)

