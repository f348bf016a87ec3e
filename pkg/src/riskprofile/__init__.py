"""Risk Profiles for probabilistic forecasts, built on the coupled exponential family."""

__version__ = "0.1.0"

from .coupled_core import (  # noqa: E402
    LIMIT_THRESHOLD,
    CouplingParams,
    conjugate_risk,
    coupled_exp,
    coupled_exp_truncated,
    coupled_log,
    dual_coupling,
    gen_exp,
    gen_exp_truncated,
    gen_log,
    kappa_from_risk,
    measured_risk_sensitivity,
    risk_bias,
)
from .coupled_distributions import (  # noqa: E402
    CoupledExponential1D,
    CoupledGaussian1D,
    MultivariateCoupledGaussian,
    ce_pdf,
    cg_cdf,
    cg_normalization,
    cg_pdf,
    cg_sample,
    coupled_avg_identities,
    density_avg,
    density_gen_mean,
    mcg_logpdf,
    mcg_pdf,
)
from .errors import (  # noqa: E402
    ClampWarning,
    DivergentIntegralError,
    DomainError,
    IdentityError,
    InputError,
    ParameterError,
    RiskProfileError,
    SupportMismatchWarning,
)
from .forecast_bench import ExperimentConfig, run_sweep  # noqa: E402
from .prob_metrics import (  # noqa: E402
    InfoTriple,
    coupled_probability,
    cross_entropy_prob,
    dist_gen_mean,
    distribution_aggregate_identity,
    divergence_prob,
    generalized_aggregate,
    info_triple,
    sigma_ln_p,
    weighted_gen_mean,
)
from .risk_profile import (  # noqa: E402
    DECISIVE_R,
    NEUTRAL_R,
    ROBUST_R,
    MetricSummary,
    RiskProfileCurve,
    default_r_grid,
    generalized_surprisal,
    metric_summary,
    profile_curve,
    profile_point,
    surprisal,
)
