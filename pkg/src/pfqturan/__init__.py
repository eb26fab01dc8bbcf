"""Turan-type inequalities for generalized hypergeometric functions.

Evaluation of pFq and of the Gamma-prefactored ``f(mu; x)`` at high
precision, exact rational Taylor coefficients of generalized Turanians,
checkable parameter conditions (Muntz polynomials, weak supermajorization,
elementary symmetric chains), Laguerre-type inequalities, a zero finder and
seeded scans with JSON reports.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConvergenceError,
    DimensionError,
    DomainError,
    HypothesisError,
    PfqError,
    PoleError,
    TruncationError,
)
from .hyperfn import (  # noqa: E402
    ExactSeries,
    HyperParams,
    PrecisionCtx,
    derivative_pFq,
    eval_f_mu,
    eval_pFq,
    exact_series,
    gamma_ratio,
    pochhammer,
)
from .conditions import (  # noqa: E402
    EspChainVerdict,
    MuntzTag,
    MuntzVerdict,
    esp_chain_decr,
    esp_chain_incr,
    muntz_nonneg,
    positive_sequence,
    rpq_eval,
    rpq_exact,
    theorem2_case,
    weak_supermajorize,
)
from .turanian import (  # noqa: E402
    ScaledTuranian,
    ShiftSpec,
    delta_coeffs_exact,
    delta_coeffs_float,
    delta_coeffs_proofsum,
    delta_f,
    verify_theorem1,
    verify_theorem3,
)
from .laguerre import (  # noqa: E402
    LPVerdict,
    ZeroSet,
    check_zeros_real_negative,
    find_zeros,
    laguerre_inequality,
    laguerre_Ln,
    laguerre_Ln_all,
    lp_membership,
)
from .scan import (  # noqa: E402
    ScanConfig,
    ScanReport,
    load_config,
    run_scan,
    scan_conjecture1,
    scan_conjecture2,
    scan_conjecture3,
    scan_counterexample_small_shifts,
)

import types as _types  # noqa: E402

__all__ = [name for name, obj in dict(globals()).items()
           if not name.startswith("_") and not isinstance(obj, _types.ModuleType)]
