"""svpforge: compile constraint satisfaction instances into gapped
shortest-vector instances, with executable checks for every promised bound.

The pipeline:

  parse_csp -> (regularize) -> derive_profile -> reduce_csp -> save_instance

and on the checking side:

  witness_from_assignment, enumerate_box, audit_vector, extract_assignment
"""

from .csp import (
    Constraint,
    CspInstance,
    emit_csp,
    evaluate,
    indicator_matrix,
    max_sat_bruteforce,
    parse_csp,
    validate_regular,
)
from .errors import (
    BudgetExceededError,
    CspParseError,
    CspValidationError,
    DisperserCertificationError,
    ProfileError,
    RegularizeError,
    SvpforgeError,
    WitnessNotFoundError,
)
from .basisio import load_instance, save_instance
from .reduction import (
    GapFactor,
    GapSvpInstance,
    ReductionProfile,
    derive_profile,
    reduce_csp,
)
from .regularize import RegularizeParams, regularize
from .verifier import (
    audit_vector,
    enumerate_box,
    extract_assignment,
    holder_check,
    indicated_view,
    lp_norm_power,
    structural_facts,
    witness_from_assignment,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "Constraint",
    "CspInstance",
    "CspParseError",
    "CspValidationError",
    "DisperserCertificationError",
    "GapFactor",
    "GapSvpInstance",
    "ProfileError",
    "ReductionProfile",
    "RegularizeError",
    "RegularizeParams",
    "SvpforgeError",
    "WitnessNotFoundError",
    "audit_vector",
    "derive_profile",
    "emit_csp",
    "enumerate_box",
    "evaluate",
    "extract_assignment",
    "holder_check",
    "indicated_view",
    "indicator_matrix",
    "load_instance",
    "lp_norm_power",
    "max_sat_bruteforce",
    "parse_csp",
    "reduce_csp",
    "regularize",
    "save_instance",
    "structural_facts",
    "validate_regular",
    "witness_from_assignment",
    "__version__",
]
