"""Dense states and operators on truncated bipartite particle-number bases.

Basis vectors |n_A, n_B> are flattened row-major, ``index = n_A * dim_b + n_B``.
When two bipartite objects are composed with :func:`tensor`, the result is
again bipartite: Alice's side carries the pair (A, A') flattened as
``n_A * dim_a' + n_A'`` and Bob's side carries (B, B') the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from .errors import SizeError, StateValidationError

Side = Literal["A", "B"]

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10
MAX_DIM = 4096


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.flags.writeable = False
    return out


def _check_side(side: str) -> None:
    if side not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")


@dataclass(frozen=True)
class FockCutoff:
    """Local dimensions of a bipartite space (max particle number plus one)."""

    dim_a: int
    dim_b: int

    def __post_init__(self):
        if int(self.dim_a) < 1 or int(self.dim_b) < 1:
            raise SizeError(f"cutoff dimensions must be >= 1, got ({self.dim_a}, {self.dim_b})")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def index(self, n_a: int, n_b: int) -> int:
        if not (0 <= n_a < self.dim_a and 0 <= n_b < self.dim_b):
            raise SizeError(f"|{n_a},{n_b}> lies outside cutoff ({self.dim_a}, {self.dim_b})")
        return n_a * self.dim_b + n_b

    def numbers(self) -> tuple[np.ndarray, np.ndarray]:
        """Local particle numbers (n_A, n_B) of every flat basis index."""
        n_a, n_b = np.divmod(np.arange(self.dim), self.dim_b)
        return n_a, n_b


@dataclass(frozen=True, eq=False)
class PureState:
    cutoff: FockCutoff
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape[0] != self.cutoff.dim:
            raise SizeError(f"amplitude vector has length {amps.shape[0]}, cutoff needs {self.cutoff.dim}")
        if not np.all(np.isfinite(amps)):
            raise StateValidationError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateValidationError(f"state is not normalized: squared norm {norm!r}")
        object.__setattr__(self, "amps", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, cutoff: FockCutoff, amps, normalize: bool = True) -> "PureState":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise StateValidationError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(cutoff, amps)

    @classmethod
    def from_terms(cls, cutoff: FockCutoff, terms: dict, normalize: bool = True) -> "PureState":
        """Build from ``{(n_a, n_b): amplitude}``."""
        amps = np.zeros(cutoff.dim, dtype=complex)
        for (n_a, n_b), c in terms.items():
            amps[cutoff.index(n_a, n_b)] += c
        return cls.from_amplitudes(cutoff, amps, normalize=normalize)

    @classmethod
    def basis(cls, cutoff: FockCutoff, n_a: int, n_b: int) -> "PureState":
        return cls.from_terms(cutoff, {(n_a, n_b): 1.0})

    @classmethod
    def product(cls, a_amps, b_amps) -> "PureState":
        """Product of two local (single-side) vectors, each normalized here."""
        a = np.asarray(a_amps, dtype=complex)
        b = np.asarray(b_amps, dtype=complex)
        a = a / np.linalg.norm(a)
        b = b / np.linalg.norm(b)
        return cls(FockCutoff(a.size, b.size), np.kron(a, b))

    def matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``(dim_a, dim_b)``."""
        return self.amps.reshape(self.cutoff.dim_a, self.cutoff.dim_b)

    def density(self) -> "DensityOperator":
        return DensityOperator(self.cutoff, np.outer(self.amps, self.amps.conj()))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    cutoff: FockCutoff
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        d = self.cutoff.dim
        if mat.shape != (d, d):
            raise SizeError(f"density matrix has shape {mat.shape}, cutoff needs ({d}, {d})")
        if not np.all(np.isfinite(mat)):
            raise StateValidationError("density matrix entries must be finite")
        herm_err = float(np.max(np.abs(mat - mat.conj().T))) if d else 0.0
        if herm_err > HERMITIAN_TOL:
            raise StateValidationError(f"density matrix is not Hermitian: max |rho - rho^dag| = {herm_err!r}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateValidationError(f"density matrix trace is {tr.real!r}, expected 1")
        min_eig = float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])
        if min_eig < PSD_FLOOR:
            raise StateValidationError(f"density matrix is not positive: minimum eigenvalue {min_eig!r}")
        object.__setattr__(self, "mat", _frozen(mat))

    @classmethod
    def mixture(cls, weights, states) -> "DensityOperator":
        """Convex mixture of pure states or density operators on one cutoff."""
        states = list(states)
        cutoff = states[0].cutoff
        mat = np.zeros((cutoff.dim, cutoff.dim), dtype=complex)
        for w, s in zip(weights, states):
            if s.cutoff != cutoff:
                raise SizeError("all mixture components must share one cutoff")
            mat += w * (s.density().mat if isinstance(s, PureState) else s.mat)
        return cls(cutoff, mat)

    @classmethod
    def diagonal(cls, weights) -> "DensityOperator":
        """Product-number-diagonal state sum_{kl} p_kl |k,l><k,l| from a 2-d weight array."""
        w = np.asarray(weights, dtype=float)
        return cls(FockCutoff(*w.shape), np.diag(w.reshape(-1)).astype(complex))

    def density(self) -> "DensityOperator":
        return self


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Operator acting on a single side."""

    dim: int
    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.shape != (self.dim, self.dim):
            raise SizeError(f"local operator has shape {mat.shape}, expected ({self.dim}, {self.dim})")
        if not np.all(np.isfinite(mat)):
            raise ValueError("local operator entries must be finite")
        object.__setattr__(self, "mat", _frozen(mat))


State = Union[PureState, DensityOperator]


def tensor(x: State, y: State, max_dim: int = MAX_DIM) -> State:
    """Compose two bipartite objects, grouping (A, A') and (B, B').

    Raises :class:`SizeError` when the composite dimension exceeds ``max_dim``.
    """
    if type(x) is not type(y):
        raise TypeError(f"cannot tensor {type(x).__name__} with {type(y).__name__}")
    c1, c2 = x.cutoff, y.cutoff
    cutoff = FockCutoff(c1.dim_a * c2.dim_a, c1.dim_b * c2.dim_b)
    if cutoff.dim > max_dim:
        raise SizeError(f"composite dimension {cutoff.dim} exceeds the maximum {max_dim}")
    if isinstance(x, PureState):
        t = np.einsum("ab,cd->acbd", x.matrix(), y.matrix())
        return PureState(cutoff, t.reshape(-1))
    a1, b1, a2, b2 = c1.dim_a, c1.dim_b, c2.dim_a, c2.dim_b
    r1 = x.mat.reshape(a1, b1, a1, b1)
    r2 = y.mat.reshape(a2, b2, a2, b2)
    # rows (A, B, A', B') -> (A, A', B, B'), same for columns
    t = np.einsum("ijkl,mnop->imjnkolp", r1, r2)
    return DensityOperator(cutoff, t.reshape(cutoff.dim, cutoff.dim))


def partial_trace(rho: State, trace_out: Side = "B") -> LocalOperator:
    """Reduced operator on the side that is kept."""
    _check_side(trace_out)
    rho = rho.density()
    da, db = rho.cutoff.dim_a, rho.cutoff.dim_b
    r = rho.mat.reshape(da, db, da, db)
    if trace_out == "B":
        return LocalOperator(da, np.einsum("ijkj->ik", r))
    return LocalOperator(db, np.einsum("ijil->jl", r))


def partial_transpose(rho, side: Side = "B", cutoff: Optional[FockCutoff] = None) -> np.ndarray:
    """Transpose the chosen side's indices. A raw matrix needs ``cutoff`` (so the map can be iterated)."""
    _check_side(side)
    if isinstance(rho, np.ndarray):
        if cutoff is None:
            raise ValueError("a raw matrix needs an explicit cutoff")
        mat = rho
    else:
        rho = rho.density()
        cutoff, mat = rho.cutoff, rho.mat
    da, db = cutoff.dim_a, cutoff.dim_b
    r = mat.reshape(da, db, da, db)
    r = r.transpose(0, 3, 2, 1) if side == "B" else r.transpose(2, 1, 0, 3)
    return r.reshape(da * db, da * db)


def min_partial_transpose_eigenvalue(rho: State, side: Side = "B") -> float:
    return float(np.linalg.eigvalsh(partial_transpose(rho, side))[0])


def is_ppt(rho: State, tol: float = -PSD_FLOOR) -> bool:
    return min_partial_transpose_eigenvalue(rho) >= -tol


def total_numbers(cutoff: FockCutoff) -> np.ndarray:
    n_a, n_b = cutoff.numbers()
    return n_a + n_b


def total_number_projector(n: int, cutoff: FockCutoff) -> np.ndarray:
    """Projector onto states with n particles in total (zero matrix if n is out of range)."""
    return np.diag((total_numbers(cutoff) == n).astype(float))


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float))


def random_density(cutoff: FockCutoff, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random full or fixed-rank density operator (Ginibre construction)."""
    d = cutoff.dim
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityOperator(cutoff, m / np.trace(m).real)


def random_pure(cutoff: FockCutoff, rng: np.random.Generator) -> PureState:
    v = rng.standard_normal(cutoff.dim) + 1j * rng.standard_normal(cutoff.dim)
    return PureState.from_amplitudes(cutoff, v)
