"""Particle-number superselection: twirling, SSR-LOCC tests and the coherence parameter."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .fock import DensityOperator, FockCutoff, PureState, Side, State, _check_side, total_numbers

SSR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LadderPair:
    """Shift operators R+ = sum_a |a+delta><a| and R- = sum_b |b-delta><b| on one mode."""

    delta: int
    dim: int
    r_plus: np.ndarray = field(init=False, repr=False)
    r_minus: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.delta < 1:
            raise PreconditionError(f"delta must be >= 1, got {self.delta}")
        rp = np.eye(self.dim, k=-self.delta)
        rm = np.eye(self.dim, k=self.delta)
        rp.flags.writeable = False
        rm.flags.writeable = False
        object.__setattr__(self, "r_plus", rp)
        object.__setattr__(self, "r_minus", rm)


def _dephase(rho: DensityOperator, labels: np.ndarray) -> DensityOperator:
    keep = labels[:, None] == labels[None, :]
    return DensityOperator(rho.cutoff, np.where(keep, rho.mat, 0.0))


def twirl_global(rho: State) -> DensityOperator:
    """sum_n Pi_n rho Pi_n over total particle number."""
    rho = rho.density()
    return _dephase(rho, total_numbers(rho.cutoff))


def twirl_local(rho: State, side: Side) -> DensityOperator:
    """Dephase with respect to one party's particle number."""
    _check_side(side)
    rho = rho.density()
    n_a, n_b = rho.cutoff.numbers()
    return _dephase(rho, n_a if side == "A" else n_b)


def is_ssr_compliant(rho: State, tol: float = SSR_TOL) -> bool:
    rho = rho.density()
    return float(np.max(np.abs(rho.mat - twirl_global(rho).mat))) <= tol


def is_ssr_locc(rho: State, tol: float = SSR_TOL) -> bool:
    """True iff rho is diagonal in the product number basis."""
    m = rho.density().mat
    off = m - np.diag(np.diag(m))
    return float(np.max(np.abs(off))) <= tol


def _check_delta(cutoff: FockCutoff, delta: int) -> None:
    upper = min(cutoff.dim_a, cutoff.dim_b)
    if not (1 <= delta < upper):
        raise PreconditionError(f"delta must satisfy 1 <= delta < {upper} for cutoff "
                                f"({cutoff.dim_a}, {cutoff.dim_b}), got {delta}")


def coherence_v(rho: State, delta: int) -> float:
    """Re Tr[(R+ (x) R-) rho] with R+ on Alice's side and R- on Bob's."""
    rho = rho.density()
    c = rho.cutoff
    _check_delta(c, delta)
    rp = LadderPair(delta, c.dim_a).r_plus
    rm = LadderPair(delta, c.dim_b).r_minus
    r = rho.mat.reshape(c.dim_a, c.dim_b, c.dim_a, c.dim_b)
    return float(np.einsum("ik,jl,klij->", rp, rm, r).real)


def fixed_number_coefficients(phi: PureState, tol: float = SSR_TOL) -> tuple[int, np.ndarray]:
    """Return (N', r) with phi = sum_i r_i |i, N'-i>; raise if phi mixes total numbers."""
    c = phi.cutoff
    tot = total_numbers(c)
    support = np.abs(phi.amps) > tol
    totals = np.unique(tot[support])
    if totals.size != 1:
        raise PreconditionError(f"pure state is not SSR-compliant: supported on total numbers {totals.tolist()}")
    n_tot = int(totals[0])
    r = np.zeros(n_tot + 1, dtype=complex)
    for i in range(n_tot + 1):
        j = n_tot - i
        if i < c.dim_a and j < c.dim_b:
            r[i] = phi.amps[c.index(i, j)]
    return n_tot, r


def coherence_v_coefficients(r, delta: int) -> float:
    """sum_i Re(conj(r_{i+delta}) r_i) for a fixed-number pure state."""
    r = np.asarray(r, dtype=complex)
    if delta < 1:
        raise PreconditionError(f"delta must be >= 1, got {delta}")
    if delta >= r.size:
        return 0.0
    return float(np.sum(np.conj(r[delta:]) * r[:-delta]).real)


@dataclass(frozen=True)
class WitnessResult:
    max_abs_v: float
    delta: int
    values: dict

    @property
    def ssr_locc(self) -> bool:
        return self.max_abs_v <= SSR_TOL


def ssr_locc_witness(rho: State) -> WitnessResult:
    """Scan delta = 1 .. min(dim) - 1 and report the largest |V| (smallest delta on ties)."""
    rho = rho.density()
    upper = min(rho.cutoff.dim_a, rho.cutoff.dim_b)
    values = {d: coherence_v(rho, d) for d in range(1, upper)}
    best_delta, best = 1, 0.0
    for d, v in values.items():
        if abs(v) > best + SSR_TOL:
            best_delta, best = d, abs(v)
    return WitnessResult(best, best_delta, values)


@dataclass(frozen=True)
class CriteriaComparison:
    diagonal: bool
    witness_zero: bool
    witness: WitnessResult

    @property
    def agree(self) -> bool:
        return self.diagonal == self.witness_zero


def compare_criteria(rho: State) -> CriteriaComparison:
    """Diagonality test and the delta-scan witness side by side; ``agree`` flags conflicts."""
    w = ssr_locc_witness(rho)
    return CriteriaComparison(is_ssr_locc(rho), w.ssr_locc, w)


def twirl_invariance_check(rho_raw: State, delta: int) -> tuple[float, float]:
    """(V of the globally twirled state, V of the raw state); the two agree."""
    return coherence_v(twirl_global(rho_raw), delta), coherence_v(rho_raw, delta)
