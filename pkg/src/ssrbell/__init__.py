"""Bell experiments with reference frames under particle-number superselection."""

from .bell import (CHSHSettings, PrincipalState, SSRObservable, build_observable, chsh, chsh_optimal,
                   correlation, outcome_probabilities, ssr_locc_lhv_check)
from .fock import DensityOperator, FockCutoff, LocalOperator, PureState, partial_trace, partial_transpose, tensor
from .photonic import PhotonicSetup, photonic_chsh_max, photonic_correlation, threshold_nbar
from .reference import MinimalReference, ProductReference, optimal_product_reference
from .ssr import coherence_v, is_ssr_compliant, is_ssr_locc, twirl_global, twirl_local

__version__ = "0.1.0"
