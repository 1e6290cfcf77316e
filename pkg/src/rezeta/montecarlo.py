"""Monte Carlo estimation of the negativity density d(sigma).

The model: independent phases theta_p ~ U[0, 2pi) for primes p up to a
cutoff define a random Euler product

    Z = prod_p (1 - p^(-sigma) e^(i theta_p))^(-1),

the distributional stand-in for zeta(sigma+it) at large random t (the
orbits (p^(-it))_p equidistribute on the torus).  d(sigma) is estimated
as the fraction of samples with Re Z < 0.

Everything runs in log space: per factor, with x = p^(-sigma),

    -log(1 - x e^(i theta)) has real part -0.5 log1p(x^2 - 2x cos theta)
                            and imag part atan2(x sin theta, 1 - x cos theta),

so Re Z < 0 is decided by cos(sum of imag parts) alone and the product
never overflows for sigma >= 1.  (For sub-1 sigma experiments the real
part is capacity-checked before exponentiation.)

Useful exact moments, used by moment_check and the tests: each factor
has unit mean (the geometric series integrates term by term), so E Z = 1
at every sigma; E |Z|^2 = prod_p (1 - p^(-2 sigma))^(-1), which at
sigma = 1 converges to zeta(2) = pi^2/6 as the cutoff grows.

Reproducibility: stream k of a run draws from PCG64 seeded with
SeedSequence([seed, k]); trials are split across streams up front and
accumulators are merged in stream order, so a result depends only on
(sigma, prime_cutoff, trials, seed, streams) -- bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, DomainError
from .primes import sieve_primes

ZETA2 = math.pi ** 2 / 6
DEFAULT_CUTOFF = 100_000
_LOW_SIGMA = 1.05      # below this, truncation bias forces a large cutoff
_MIN_CUTOFF_LOW = 10_000
_EXP_CAP = 700.0       # exp overflow threshold for float64 (log space)
_GARWOOD_BELOW = 100   # hits below this get the exact Poisson interval


@dataclass(frozen=True)
class ModelConfig:
    """Parameters of one estimation run; validated on construction."""
    sigma: float
    trials: int
    seed: int = 0
    streams: int = 1
    prime_cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if not (isinstance(self.sigma, (int, float)) and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be a finite real, got {self.sigma!r}")
        if self.sigma < 1:
            raise DomainError(f"density estimation needs sigma >= 1, got {self.sigma}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.streams < 1:
            raise DomainError(f"streams must be >= 1, got {self.streams}")
        if self.seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {self.seed}")
        if self.prime_cutoff < 2:
            raise DomainError(f"prime_cutoff must be >= 2, got {self.prime_cutoff}")
        if self.sigma <= _LOW_SIGMA and self.prime_cutoff < _MIN_CUTOFF_LOW:
            raise DomainError(
                f"sigma = {self.sigma} <= {_LOW_SIGMA} needs prime_cutoff >= "
                f"{_MIN_CUTOFF_LOW} (truncation bias), got {self.prime_cutoff}"
            )


def _factor_logs(x: np.ndarray, phases: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample (Re log Z, Im log Z); phases has shape (..., len(x))."""
    c = np.cos(phases)
    re = -0.5 * np.log1p(x * (x - 2.0 * c)).sum(axis=-1)
    im = np.arctan2(x * np.sin(phases), 1.0 - x * c).sum(axis=-1)
    return re, im


def sample_model(sigma: float, phases, primes) -> complex:
    """One draw of Z = prod (1 - p^(-sigma) e^(i theta_p))^(-1).

    Accepts any sigma > 0 (the estimator's sigma >= 1 restriction is a
    statement about d, not about the model); raises CapacityError when
    |Z| would overflow the exponential, which only sub-1 sigma with
    adversarial phases can reach.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    phases = np.asarray(phases, dtype=np.float64)
    primes = np.asarray(primes)
    if phases.ndim != 1 or phases.shape != primes.shape:
        raise DomainError(
            f"phases and primes must be 1-d and equal length, got "
            f"{phases.shape} vs {primes.shape}"
        )
    x = primes.astype(np.float64) ** (-sigma)
    re, im = _factor_logs(x, phases)
    if re > _EXP_CAP:
        raise CapacityError(f"|Z| = exp({re:.1f}) overflows float64")
    return complex(math.exp(re) * math.cos(im), math.exp(re) * math.sin(im))


# -- accumulation ------------------------------------------------------------

_ACC_KEYS = ("n", "hits", "s_re", "s_im", "s_abs2", "s_re2", "s_abs4")


def _zero_acc() -> dict:
    return {k: 0.0 for k in _ACC_KEYS}


def _merge(a: dict, b: dict) -> dict:
    return {k: a[k] + b[k] for k in _ACC_KEYS}


def _run_stream(sigma: float, x: np.ndarray, trials: int, seed: int,
                stream: int) -> dict:
    """All trials of one stream, chunked; chunk size depends only on the
    prime count, so the draw sequence is a pure function of the config."""
    acc = _zero_acc()
    if trials == 0:
        return acc
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))
    chunk = max(256, 4_000_000 // len(x))
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        phases = rng.random((m, len(x))) * (2.0 * math.pi)
        re, im = _factor_logs(x, phases)
        if float(np.max(re)) > _EXP_CAP:
            raise CapacityError("sample magnitude overflows float64")
        mag = np.exp(re)
        zre = mag * np.cos(im)
        zim = mag * np.sin(im)
        abs2 = mag * mag
        acc["n"] += m
        acc["hits"] += int(np.count_nonzero(zre < 0.0))
        acc["s_re"] += float(zre.sum())
        acc["s_im"] += float(zim.sum())
        acc["s_abs2"] += float(abs2.sum())
        acc["s_re2"] += float((zre * zre).sum())
        acc["s_abs4"] += float((abs2 * abs2).sum())
        done += m
    return acc


def _run_config(config: ModelConfig, threads: int = 1) -> dict:
    """Accumulators for a whole config.  Streams are independent, so with
    threads > 1 they run on a thread pool (numpy's transcendental kernels
    release the GIL); results are merged in stream order either way, so
    the outcome is bit-identical for any thread count."""
    primes = sieve_primes(config.prime_cutoff)
    x = primes.astype(np.float64) ** (-float(config.sigma))
    base, extra = divmod(config.trials, config.streams)
    sizes = [base + (1 if k < extra else 0) for k in range(config.streams)]

    def one(k: int) -> dict:
        return _run_stream(config.sigma, x, sizes[k], config.seed, k)

    acc = _zero_acc()
    if threads > 1 and config.streams > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(one, range(config.streams)):
                acc = _merge(acc, part)
    else:
        for k in range(config.streams):
            acc = _merge(acc, one(k))
    return acc


def _interval(hits: int, n: int) -> tuple[float, float, str]:
    """95% CI for the hit probability.  Small counts get the exact
    (Garwood) Poisson interval -- a normal interval around 3 hits in 1e7
    trials is garbage; large counts get the usual normal approximation."""
    if hits < _GARWOOD_BELOW:
        from scipy.stats import chi2
        lo = 0.0 if hits == 0 else float(chi2.ppf(0.025, 2 * hits)) / (2 * n)
        hi = float(chi2.ppf(0.975, 2 * hits + 2)) / (2 * n)
        return lo, hi, "garwood"
    p = hits / n
    half = 1.959963984540054 * math.sqrt(p * (1.0 - p) / n)
    return max(0.0, p - half), p + half, "normal"


def _arg_tail_bounds(sigma: float, cutoff: int) -> tuple[float, float]:
    """Diagnostics for the truncation: how much the omitted factors
    (p > cutoff) can move arg Z.  Worst case per factor is
    arcsin(p^(-sigma)) <= 1.05 p^(-sigma) (x <= 1/2 here); summed over
    p > cutoff with a Chebyshev-type prime density 1.3/log x this gives
    the sup bound (divergent, hence inf, at sigma = 1); the random-phase
    RMS uses the per-factor arg variance ~ x^2/2 and always converges.
    Estimates, not certificates -- reported so truncation is never
    silently treated as exact.
    """
    lnC = math.log(cutoff)
    rms = math.sqrt(1.4 / lnC * cutoff ** (1.0 - 2 * sigma) / (2 * sigma - 1) / 2)
    if sigma > 1:
        sup = 1.4 / lnC * cutoff ** (1.0 - sigma) / (sigma - 1)
    else:
        sup = math.inf
    return rms, sup


@dataclass(frozen=True)
class EstimatorStats:
    sigma: float
    trials: int
    negative_hits: int
    d_hat: float
    ci95: tuple[float, float]
    ci_method: str        # "garwood" (exact Poisson, rare events) or "normal"
    mean: float           # sample E Re Z; exact value is 1 at every sigma
    mean_im: float        # sample E Im Z; exact value is 0
    mean_abs2: float      # sample E |Z|^2; -> zeta(2) at sigma = 1
    variance: float       # complex sample variance: mean|Z|^2 - |mean Z|^2
    arg_tail_rms: float   # truncation diagnostics, see _arg_tail_bounds
    arg_tail_sup: float
    prime_cutoff: int
    streams: int
    seed: int

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "sigma", "trials", "negative_hits", "d_hat", "ci_method",
            "mean", "mean_im", "mean_abs2", "variance",
            "arg_tail_rms", "arg_tail_sup", "prime_cutoff", "streams", "seed")}
        d["ci95"] = list(self.ci95)
        return d


def estimate_d(config: ModelConfig, threads: int = 1) -> EstimatorStats:
    """Monte Carlo estimate of d(sigma) = P(Re Z < 0) under the random
    Euler product model, with a 95% confidence interval.  threads > 1
    spreads the config's streams over a thread pool without changing the
    result."""
    acc = _run_config(config, threads=threads)
    n = int(acc["n"])
    hits = int(acc["hits"])
    lo, hi, method = _interval(hits, n)
    m_re, m_im = acc["s_re"] / n, acc["s_im"] / n
    m_abs2 = acc["s_abs2"] / n
    rms, sup = _arg_tail_bounds(config.sigma, config.prime_cutoff)
    return EstimatorStats(
        sigma=config.sigma, trials=n, negative_hits=hits, d_hat=hits / n,
        ci95=(lo, hi), ci_method=method,
        mean=m_re, mean_im=m_im, mean_abs2=m_abs2,
        variance=m_abs2 - (m_re * m_re + m_im * m_im),
        arg_tail_rms=rms, arg_tail_sup=sup,
        prime_cutoff=config.prime_cutoff, streams=config.streams,
        seed=config.seed,
    )


@dataclass(frozen=True)
class MomentReport:
    """Consistency check of the sampler against exactly known moments.

    mean_ok: sample mean of Re Z within 3 SE of the exact E Z = 1 (any
    sigma).  variance_ok: at sigma = 1 only, complex sample variance
    within 3 SE of zeta(2) - 1 ~ 0.645; None when sigma != 1 (the clean
    closed-form target is pinned only there) or when the run is
    degenerate.  degenerate: too few trials for a standard error.
    """
    sigma: float
    trials: int
    mean: float
    mean_im: float
    se_mean: float
    variance: float
    se_variance: float
    variance_target: Optional[float]
    mean_ok: Optional[bool]
    variance_ok: Optional[bool]
    degenerate: bool


def moment_check(config: ModelConfig, threads: int = 1) -> MomentReport:
    """Run the sampler of estimate_d and compare against exact moments.

    Uses the same seed derivation, so it validates precisely the stream
    that estimates consume.
    """
    acc = _run_config(config, threads=threads)
    n = int(acc["n"])
    m_re, m_im = acc["s_re"] / n, acc["s_im"] / n
    m_abs2 = acc["s_abs2"] / n
    variance = m_abs2 - (m_re * m_re + m_im * m_im)
    if n < 2:
        return MomentReport(config.sigma, n, m_re, m_im, float("nan"),
                            variance, float("nan"), None, None, None, True)
    var_re = max(0.0, acc["s_re2"] / n - m_re * m_re) * n / (n - 1)
    # the variance estimate's own noise is dominated by mean|Z|^2's
    var_abs2 = max(0.0, acc["s_abs4"] / n - m_abs2 * m_abs2) * n / (n - 1)
    se_re = math.sqrt(var_re / n)
    se_var = math.sqrt(var_abs2 / n)
    mean_ok = abs(m_re - 1.0) <= 3 * se_re
    if config.sigma == 1:
        target: Optional[float] = ZETA2 - 1.0
        variance_ok: Optional[bool] = abs(variance - (ZETA2 - 1.0)) <= 3 * se_var
    else:
        target, variance_ok = None, None
    return MomentReport(config.sigma, n, m_re, m_im, se_re, variance, se_var,
                        target, mean_ok, variance_ok, False)


def two_prime_quadrature(sigma: float, grid: int = 2048) -> float:
    """P(Re Z < 0) for the two-prime model {2, 3} by midpoint quadrature
    over the phase torus -- an RNG-free oracle for the sampler.

    Re Z < 0 iff cos(arg Z) < 0, and with only two factors arg Z =
    sum of the factor arguments, each bounded by arcsin(p^(-sigma)); at
    sigma = 1 the bound is arcsin(1/2) + arcsin(1/3) < pi/2 and the
    probability is exactly 0.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if grid < 8:
        raise DomainError(f"grid must be >= 8, got {grid}")
    th = (np.arange(grid) + 0.5) * (2.0 * math.pi / grid)
    args = []
    for p in (2.0, 3.0):
        x = p ** (-sigma)
        args.append(np.arctan2(x * np.sin(th), 1.0 - x * np.cos(th)))
    total = args[0][:, None] + args[1][None, :]
    return float(np.count_nonzero(np.cos(total) < 0.0)) / (grid * grid)
