"""Random caching with interference nulling in two-tier Poisson cellular
networks: analytic success-probability / ASE formulas, a Monte Carlo oracle,
and cache-placement optimizers."""

from .errors import (
    HetnetError, InvalidParam, NonConvergence, DegenerateInput,
    InfeasibleMarginals, InstanceTooLarge, NoEligibleServer, InfeasibleSum,
    NonMonotoneCCP, MaxIters, ConfigError,
)
from .model import (
    NetworkParams, ContentConfig, CachingPolicy, AnalyticReport,
    zipf_popularity,
)
from .specfun import (
    SpecFunConfig, gauss_2f1_neg, capital_f, capital_g, f_tilde, beta,
    lower_inc_gamma_reg,
)
from .analytics import (
    mean_theta, theta_pmf, in_miss_prob, psi1, q1, toeplitz_coeffs,
    psi2_exact, psi2_lower, psi2_upper, psi2_special, q2, ase, report,
)
from .simulator import (
    SimConfig, SimEstimate, SimSweepResult, CacheRealization,
    sample_ppp, realize_caches, solve_pi_least_squares,
    estimate, estimate_sweep,
)
from .optimizer import (
    OptimizerConfig, Solution, mu_interval_upper, kkt_continuous,
    discrete_enumerate, mu_line_search, alternate, ccp_upper,
    baseline_mpc, baseline_udc, projected_gradient,
)

__version__ = "0.1.0"
