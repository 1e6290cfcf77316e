"""High-precision tools around the negativity of Re zeta on and near sigma = 1.

Three jobs: (1) the constant sigma0 -- the unique root of
sum_p arcsin(p^(-sigma)) = pi/2, the rightmost abscissa where the real
part of zeta can vanish -- to arbitrary precision; (2) detection,
refinement, and slope-bound certification of the windows on sigma = 1
where Re zeta(1+it) <= 0; (3) Monte Carlo estimation of the negativity
density d(sigma) under the random Euler product model.
"""

from .errors import (BracketError, CapacityError, DomainError, EvaluatorError,
                     PoleError, PrecisionError, RezetaError)
from .kernel import (PrecisionContext, bernoulli, constant_gamma, constant_pi,
                     log_zeta, log_zeta_batch, zeta_complex, zeta_real)
from .linescan import (CertifiedRange, CertifyFailure, NegativeWindow,
                       ScanReport, certify_positive, empirical_d,
                       find_negative_windows, re_zeta_line, sample_line, scan,
                       slope_bound)
from .montecarlo import (EstimatorStats, ModelConfig, MomentReport, estimate_d,
                         moment_check, sample_model, two_prime_quadrature)
from .primes import MoebiusTable, PrimeSieve, moebius, moebius_table, sieve_primes
from .primezeta import prime_zeta, prime_zeta_bruteforce
from .rootfind import Bracket, ZeroResult, find_zero
from .sigma0 import (Sigma0Result, arcsin_coeff, d_coeff, f_arcsin_series,
                     f_logzeta_series, logzeta_coeff, solve_sigma0)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
