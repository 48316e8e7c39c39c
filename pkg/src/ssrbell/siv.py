"""Superselection-induced variance (SIV) of reference states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .fock import FockCutoff, PureState, State, total_numbers
from .reference import MinimalReference, minimal_to_density
from .ssr import coherence_v, is_ssr_compliant

RELATION_TOL = 1e-12
RANK_FLOOR = 1e-14


def pure_siv(phi: PureState) -> float:
    """4 Var(N_A); one unit for (|n,n+1> + |n+1,n>)/sqrt(2)."""
    p_a = np.sum(np.abs(phi.matrix()) ** 2, axis=1)
    n = np.arange(p_a.size)
    mean = float(p_a @ n)
    return 4.0 * max(float(p_a @ n ** 2) - mean ** 2, 0.0)


def pure_siv_bob(phi: PureState) -> float:
    p_b = np.sum(np.abs(phi.matrix()) ** 2, axis=0)
    n = np.arange(p_b.size)
    mean = float(p_b @ n)
    return 4.0 * max(float(p_b @ n ** 2) - mean ** 2, 0.0)


def vf_bound_minimal(m: MinimalReference) -> float:
    """Lower bound 4 (p_phi r0 r1)^2 on the variance of formation."""
    return 4.0 * m.v ** 2


def siv_witness_relation(m: MinimalReference) -> bool:
    v = coherence_v(minimal_to_density(m), 1)
    return abs(v) <= np.sqrt(vf_bound_minimal(m)) / 2 + RELATION_TOL


def _ensemble_siv(vectors: np.ndarray, n_a: np.ndarray) -> np.ndarray:
    """sum_i p_i V(phi_i) for ensembles stored as columns of ``vectors[..., :, i]`` (unnormalized)."""
    prob = np.abs(vectors) ** 2
    w = prob.sum(axis=-2)
    m1 = np.einsum("d,...di->...i", n_a, prob)
    m2 = np.einsum("d,...di->...i", n_a ** 2, prob)
    safe = np.where(w > RANK_FLOOR, w, 1.0)
    per = np.where(w > RANK_FLOOR, m2 - m1 ** 2 / safe, 0.0)
    return 4.0 * np.maximum(per, 0.0).sum(axis=-1)


def haar_isometries(count: int, k: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-random k x r isometries (first r columns of Haar unitaries)."""
    z = rng.standard_normal((count, k, k)) + 1j * rng.standard_normal((count, k, k))
    q, rr = np.linalg.qr(z)
    d = np.diagonal(rr, axis1=-2, axis2=-1)
    q = q * (d / np.abs(d))[:, None, :]
    return q[:, :, :r]


def vf_ensemble_upper_bound(rho: State, restarts: int = 64, seed: int = 0) -> float:
    """Smallest ensemble-average SIV found over SSR-compliant decompositions.

    Each fixed-total-number block is decomposed independently. Candidates are the
    eigen-ensemble, the columns of the block square root, and ``restarts`` random
    isometries (k x r, r <= k <= 2r for block rank r) applied to the eigen-ensemble.
    A rank-one block has a unique decomposition and is evaluated exactly.
    """
    rho = rho.density()
    if not is_ssr_compliant(rho):
        raise PreconditionError("variance of formation needs an SSR-compliant state")
    n_a_all, _ = rho.cutoff.numbers()
    tot = total_numbers(rho.cutoff)
    rng = np.random.default_rng(seed)
    total = 0.0
    for t in np.unique(tot):
        idx = np.flatnonzero(tot == t)
        block = rho.mat[np.ix_(idx, idx)]
        w, vecs = np.linalg.eigh(0.5 * (block + block.conj().T))
        keep = w > RANK_FLOOR
        if not np.any(keep):
            continue
        x = vecs[:, keep] * np.sqrt(w[keep])
        n_a = n_a_all[idx].astype(float)
        best = min(float(_ensemble_siv(x, n_a)), float(_ensemble_siv(x @ vecs[:, keep].conj().T, n_a)))
        r = x.shape[1]
        if r > 1 and restarts > 0:
            ks = rng.integers(r, 2 * r + 1, size=restarts)
            for k in np.unique(ks):
                u = haar_isometries(int(np.sum(ks == k)), int(k), r, rng)
                vals = _ensemble_siv(x @ np.swapaxes(u, -1, -2), n_a)
                best = min(best, float(vals.min()))
        total += best
    return total


@dataclass(frozen=True)
class SIVReport:
    pure_siv: float
    vf_lower_bound: float
    vf_upper_bound: float
    v_abs: float

    @property
    def sandwich_holds(self) -> bool:
        return self.vf_lower_bound <= self.vf_upper_bound + 1e-9


def siv_report(m: MinimalReference, restarts: int = 64, seed: int = 0) -> SIVReport:
    """Bounds for a minimal-family reference; ``pure_siv`` refers to its |phi> component."""
    phi = PureState.from_terms(FockCutoff(2, 2), {(0, 1): m.r0, (1, 0): m.r1}, normalize=False)
    rho = minimal_to_density(m)
    return SIVReport(pure_siv(phi), vf_bound_minimal(m), vf_ensemble_upper_bound(rho, restarts, seed),
                     abs(coherence_v(rho, 1)))
