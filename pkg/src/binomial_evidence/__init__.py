"""Evidence on an absolute scale for binomial hypothesis contrasts.

E is computed from an equation of state in the entropy S (the maximum log
likelihood ratio), the likelihood-ratio volume V and, for nested contrasts,
a correction b.
"""

from .analysis import (
    ContourPoint,
    ContourSpec,
    SweepRow,
    TransitionPoint,
    TransitionPoints,
    favored,
    find_trp,
    golden_section_minimize,
    iso_contour,
    iso_sample_size,
    sweep_evidence,
)
from .core import (
    HCClass,
    HypothesisContrast,
    Observation,
    constrained_mle,
    denominator_side,
    kld,
    kld_obs,
    log_likelihood,
    unconstrained_mle,
)
from .eos import (
    DEFAULT_MODEL,
    EvidenceModel,
    EvidenceResult,
    Favored,
    dof_c1,
    evidence_E,
    evidence_value,
    log_evidence,
)
from .errors import (
    DegenerateMinimum,
    EvidenceError,
    InvalidClass,
    NonConvergence,
    NonPositiveDenominator,
    NotBracketable,
    OutOfRange,
)
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate_exp
from .state import (
    CALIBRATED_B_NUMERATOR,
    LITERAL_B_NUMERATOR,
    StateFunctions,
    correction_b,
    entropy_S,
    log_volume,
    min_fisher_info,
    rate_constants,
    state_functions,
    volume_V,
)

__all__ = [name for name in dir() if not name.startswith("_")]
