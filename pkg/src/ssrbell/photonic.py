"""Single-photon interferometric Bell test with coherent-state references.

A photon split on a balanced beam splitter is mixed, at each site, with a
coherent state of mean photon number ``n_bar`` on a beam splitter of
reflectivity r (transmittance t = 1 - r). The photon-number correlation is

    E(phi) = [(r_a - t_a)(r_b - t_b)(n_bar - 1) + 4 sqrt(r_a r_b t_a t_b) sin phi] / (n_bar + 1)

with phi = alpha - beta the relative phase of the two coherent states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect, minimize

from .errors import ContractError

OPTIMIZER_TOL = 1e-6


@dataclass(frozen=True)
class PhotonicSetup:
    r_a: float
    r_b: float
    n_bar: float

    def __post_init__(self):
        if not (0.0 <= self.r_a <= 1.0 and 0.0 <= self.r_b <= 1.0):
            raise ValueError(f"reflectivities must lie in [0, 1], got ({self.r_a}, {self.r_b})")
        if not self.n_bar >= 0.0:
            raise ValueError(f"mean photon number must be >= 0, got {self.n_bar}")

    @classmethod
    def balanced(cls, n_bar: float) -> "PhotonicSetup":
        return cls(0.5, 0.5, n_bar)

    @classmethod
    def hessmo(cls, n_bar: float) -> "PhotonicSetup":
        """Both splitters with r * n_bar = t."""
        r = 1.0 / (1.0 + n_bar)
        return cls(r, r, n_bar)

    @property
    def t_a(self) -> float:
        return 1.0 - self.r_a

    @property
    def t_b(self) -> float:
        return 1.0 - self.r_b


def _offset_and_amplitude(setup: PhotonicSetup) -> tuple[float, float]:
    s = setup
    c = (s.r_a - s.t_a) * (s.r_b - s.t_b) * (s.n_bar - 1.0) / (s.n_bar + 1.0)
    amp = 4.0 * np.sqrt(s.r_a * s.r_b * s.t_a * s.t_b) / (s.n_bar + 1.0)
    return float(c), float(amp)


def photonic_correlation(setup: PhotonicSetup, phase):
    c, amp = _offset_and_amplitude(setup)
    return c + amp * np.sin(phase)


def photonic_chsh(setup: PhotonicSetup, phases) -> float:
    """S for phases (alpha1, alpha2, beta1, beta2)."""
    a1, a2, b1, b2 = phases
    e = lambda x: photonic_correlation(setup, x)
    return float(e(a1 - b1) + e(a1 - b2) + e(a2 - b1) - e(a2 - b2))


@dataclass(frozen=True)
class PhotonicOptimum:
    s_max: float
    phases: tuple


def photonic_chsh_analytic(setup: PhotonicSetup) -> PhotonicOptimum:
    """max |S| = 2|c| + 2 sqrt(2) |A| for E = c + A sin(phi)."""
    c, amp = _offset_and_amplitude(setup)
    phases = (0.0, np.pi / 2, -np.pi / 4, -3 * np.pi / 4)  # sine part reaches +2 sqrt(2)
    if c * amp < 0:
        phases = (np.pi, 3 * np.pi / 2, -np.pi / 4, -3 * np.pi / 4)
    return PhotonicOptimum(float(2 * abs(c) + 2 * np.sqrt(2) * abs(amp)), phases)


def photonic_chsh_grid(setup: PhotonicSetup, step: float = np.pi / 720) -> PhotonicOptimum:
    """max |S| by a full grid over (alpha2, beta1, beta2) at alpha1 = 0, then local refinement.

    For fixed alpha2 the beta1 and beta2 terms separate, so the three-dimensional
    grid reduces to one-dimensional maximizations per alpha2.
    """
    grid = np.arange(0.0, 2 * np.pi, step)
    a2 = grid[:, None]
    b = grid[None, :]
    e = lambda x: photonic_correlation(setup, x)
    g1 = e(-b) + e(a2 - b)   # terms in beta1
    g2 = e(-b) - e(a2 - b)   # terms in beta2
    best = (-np.inf, None)
    for sign in (1.0, -1.0):
        i1 = np.argmax(sign * g1, axis=1)
        i2 = np.argmax(sign * g2, axis=1)
        rows = np.arange(grid.size)
        tot = sign * (g1[rows, i1] + g2[rows, i2])
        k = int(np.argmax(tot))
        if tot[k] > best[0]:
            best = (float(tot[k]), (sign, grid[k], grid[i1[k]], grid[i2[k]]))
    sign, x0 = best[1][0], np.array(best[1][1:])
    res = minimize(lambda x: -sign * photonic_chsh(setup, (0.0, *x)), x0, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    x = res.x if -res.fun >= best[0] else x0
    phases = (0.0, float(x[0]), float(x[1]), float(x[2]))
    return PhotonicOptimum(abs(photonic_chsh(setup, phases)), phases)


def photonic_chsh_max(setup: PhotonicSetup, cross_check: bool = True) -> PhotonicOptimum:
    """Analytic maximum of |S|, optionally confirmed by :func:`photonic_chsh_grid`."""
    opt = photonic_chsh_analytic(setup)
    if cross_check:
        num = photonic_chsh_grid(setup)
        if abs(num.s_max - opt.s_max) > OPTIMIZER_TOL:
            raise ContractError(f"analytic CHSH maximum {opt.s_max!r} disagrees with grid search {num.s_max!r}")
    return opt


@dataclass(frozen=True)
class Threshold:
    n_bar: float
    p_vac: float


def threshold_nbar(xtol: float = 1e-12) -> Threshold:
    """Mean photon number at which the balanced setup reaches S = 2."""
    f = lambda n: photonic_chsh_analytic(PhotonicSetup.balanced(n)).s_max - 2.0
    root = float(bisect(f, 0.0, 2.0, xtol=xtol))
    return Threshold(root, float(np.exp(-root)))


@dataclass(frozen=True)
class ScanTable:
    n_bar: float
    r_values: np.ndarray
    s_max: np.ndarray  # indexed [r_a, r_b]

    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(int(np.argmax(self.s_max)), self.s_max.shape)
        return float(self.r_values[i]), float(self.r_values[j])

    def rows(self):
        for i, ra in enumerate(self.r_values):
            for j, rb in enumerate(self.r_values):
                yield float(ra), float(rb), float(self.s_max[i, j])


def optimality_scan(n_bar: float, grid_step: float = 0.01) -> ScanTable:
    if not 0.0 < grid_step <= 0.5:
        raise ValueError(f"grid_step must lie in (0, 0.5], got {grid_step}")
    count = int(round(1.0 / grid_step))
    r = np.round(np.linspace(0.0, 1.0, count + 1), 12)
    ra, rb = r[:, None], r[None, :]
    c = (2 * ra - 1) * (2 * rb - 1) * (n_bar - 1.0) / (n_bar + 1.0)
    amp = 4.0 * np.sqrt(ra * rb * (1 - ra) * (1 - rb)) / (n_bar + 1.0)
    return ScanTable(float(n_bar), r, 2 * np.abs(c) + 2 * np.sqrt(2) * amp)
