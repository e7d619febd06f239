"""Erasure/list error exponents for Slepian-Wolf random binning.

Exponent computations (Chernoff-style bounds, their variable-rate
extension, and the tighter type-class-enumeration bounds for binary and
general memoryless source pairs) together with a seeded Monte Carlo
simulator of random binning under the threshold erasure/list decoder and
an exact binning oracle for tiny block lengths.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateData,
    DomainError,
    InfeasibleRate,
    ResourceError,
    SourceSpecError,
    ZeroMarginal,
)
from .source_model import (
    BinarySymmetricPair,
    JointSource,
    binary_entropy,
    binary_entropy_inverse,
    conditional_entropy,
    conditional_x_given_y,
    kl_divergence,
    load_source,
    marginal_x,
    marginal_y,
    source_from_dict,
)
from .gallager_forney import ExponentResult, e0, e1, e2, r_min, t_max
from .variable_rate import RateAssignment, e0_tilde, e1_tilde, f_weights, optimal_rates
from .tce_binary import (
    PhasePoint,
    classify_region,
    e1_prime_binary,
    e2_prime_binary,
    l_closed_form,
    l_objective,
    phase_point,
    tilted_crossover,
    very_noisy_bounds,
)
from .tce_general import InnerExponent, e1_prime_general, inner_l
from .binning_simulator import (
    OracleResult,
    SimConfig,
    SlopeFit,
    TrialBatch,
    empirical_exponent,
    exact_oracle,
    run_trials,
)

__all__ = [
    "__version__",
    "BinarySymmetricPair",
    "JointSource",
    "ExponentResult",
    "RateAssignment",
    "PhasePoint",
    "InnerExponent",
    "SimConfig",
    "TrialBatch",
    "OracleResult",
    "SlopeFit",
    "DomainError",
    "ZeroMarginal",
    "InfeasibleRate",
    "SourceSpecError",
    "ResourceError",
    "DegenerateData",
    "binary_entropy",
    "binary_entropy_inverse",
    "conditional_entropy",
    "conditional_x_given_y",
    "kl_divergence",
    "load_source",
    "marginal_x",
    "marginal_y",
    "source_from_dict",
    "e0",
    "e1",
    "e2",
    "r_min",
    "t_max",
    "f_weights",
    "optimal_rates",
    "e0_tilde",
    "e1_tilde",
    "tilted_crossover",
    "l_objective",
    "l_closed_form",
    "classify_region",
    "phase_point",
    "e1_prime_binary",
    "e2_prime_binary",
    "very_noisy_bounds",
    "inner_l",
    "e1_prime_general",
    "run_trials",
    "exact_oracle",
    "empirical_exponent",
]
