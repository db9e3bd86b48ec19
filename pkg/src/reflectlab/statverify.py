"""
Monte Carlo checks of the diffusive limits
==========================================

At diffusive scale the reflected walks should look like

* ``sqrt(2) * D_n / sqrt(n)``   -> time-1 marginal of a 3d Bessel process
  (Maxwell law),
* ``(U_ref - M)(n) / sqrt(2 n)`` and ``(M - L_ref)(n) / sqrt(2 n)``
  -> time-1 marginal of reflected Brownian motion (half-normal law).

Marginals are compared with a one-sample Kolmogorov-Smirnov test.  The
reference CDFs are closed forms, cross-checked against numerical quadrature of
their densities before they are used.  Each experiment also runs a negative
control against the wrong law, which must be rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special, stats

from .exact import kdp_step_distribution
from .walks import check_seed, simulate_endpoints, simulate_kdp_batch

__all__ = [
    "KSReport",
    "MarginalOracle",
    "bes3_unit_cdf",
    "bes3_unit_pdf",
    "half_normal_unit_cdf",
    "half_normal_unit_pdf",
    "BES3",
    "HALF_NORMAL",
    "validate_oracle",
    "ks_statistic",
    "ks_critical_value",
    "ks_test",
    "bessel_samples",
    "reflected_bm_samples",
    "mc_bessel_experiment",
    "mc_reflected_bm_experiment",
    "transition_counts",
    "chi_square_agreement",
]

MIN_SAMPLES = 100
MIN_STEPS = 1000
MIN_TRIALS = 1000
_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


def _nonneg(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("argument must be non-negative")
    return r


def bes3_unit_pdf(r):
    r = _nonneg(r)
    return _SQRT_2_OVER_PI * r * r * np.exp(-0.5 * r * r)


def bes3_unit_cdf(r):
    """CDF of the distance from the origin of a 3d Brownian motion at time 1."""
    r = _nonneg(r)
    return special.erf(r / np.sqrt(2.0)) - _SQRT_2_OVER_PI * r * np.exp(-0.5 * r * r)


def half_normal_unit_pdf(r):
    r = _nonneg(r)
    return _SQRT_2_OVER_PI * np.exp(-0.5 * r * r)


def half_normal_unit_cdf(r):
    """CDF of ``|N(0, 1)|``."""
    return special.erf(_nonneg(r) / np.sqrt(2.0))


@dataclass(frozen=True)
class MarginalOracle:
    name: str
    cdf: Callable
    pdf: Callable
    upper: float = 12.0  # mass beyond is below 1e-30 for both laws


BES3 = MarginalOracle("bes3", bes3_unit_cdf, bes3_unit_pdf)
HALF_NORMAL = MarginalOracle("half-normal", half_normal_unit_cdf, half_normal_unit_pdf)


@lru_cache(maxsize=None)
def validate_oracle(oracle: MarginalOracle, points: int = 1000, tol: float = 1e-10) -> float:
    """Max deviation between ``oracle.cdf`` and the integrated density.

    The density is integrated with adaptive quadrature between consecutive
    points of a grid on ``[0, upper]`` and accumulated.  Raises if the
    deviation exceeds ``tol``; the result is cached per oracle.
    """
    grid = np.linspace(0.0, oracle.upper, points + 1)
    pieces = [integrate.quad(oracle.pdf, a, b, epsabs=1e-15, epsrel=1e-13)[0]
              for a, b in zip(grid[:-1], grid[1:])]
    quad_cdf = np.concatenate([[0.0], np.cumsum(pieces)])
    err = float(np.max(np.abs(quad_cdf - oracle.cdf(grid))))
    if err > tol:
        raise AssertionError(f"{oracle.name} CDF disagrees with quadrature by {err:.3g}")
    return err


@dataclass
class KSReport:
    sample_count: int
    statistic: float
    critical_value: float
    alpha: float
    passed: bool
    oracle: str
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "oracle": self.oracle,
            "sample_count": self.sample_count,
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "alpha": self.alpha,
            "pass": self.passed,
            "params": self.metadata,
        }


def ks_statistic(samples, cdf) -> float:
    """``sup_x |F_n(x) - F(x)|`` for a continuous reference ``F``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = cdf(x)
    above = np.arange(1, n + 1) / n - f
    below = f - np.arange(n) / n
    return float(max(above.max(), below.max()))


def ks_critical_value(n: int, alpha: float) -> float:
    """Asymptotic Kolmogorov critical value ``c(alpha) / sqrt(n)``."""
    return float(stats.kstwobign.isf(alpha) / np.sqrt(n))


def ks_test(samples, oracle: MarginalOracle, alpha: float = 0.01, **metadata) -> KSReport:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples.size}")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    validate_oracle(oracle)
    stat = ks_statistic(samples, oracle.cdf)
    crit = ks_critical_value(samples.size, alpha)
    return KSReport(int(samples.size), stat, crit, float(alpha), stat < crit,
                    oracle.name, dict(metadata))


def _check_experiment(n_steps, trials, seed):
    if n_steps < MIN_STEPS or trials < MIN_TRIALS:
        raise ValueError(f"need n_steps >= {MIN_STEPS} and trials >= {MIN_TRIALS}")
    check_seed(seed)


@lru_cache(maxsize=4)
def _endpoints(n_steps, trials, seed):
    ends = simulate_endpoints(n_steps, trials, seed)
    ends.flags.writeable = False
    return ends


def bessel_samples(n_steps: int, trials: int, seed: int) -> np.ndarray:
    """``sqrt(2) * D_n / sqrt(n)`` for each trial."""
    m, u_ref, l_ref = _endpoints(n_steps, trials, seed).T
    d = (u_ref - l_ref) // 2
    return np.sqrt(2.0) * d / np.sqrt(n_steps)


def reflected_bm_samples(n_steps: int, trials: int, seed: int) -> dict[str, np.ndarray]:
    """Scaled upper gap ``U_ref - M`` and lower gap ``M - L_ref`` at time n."""
    m, u_ref, l_ref = _endpoints(n_steps, trials, seed).T
    scale = 1.0 / np.sqrt(2.0 * n_steps)
    return {"x_hat": (u_ref - m) * scale, "y_hat": (m - l_ref) * scale}


def mc_bessel_experiment(n_steps: int = 10_000, trials: int = 20_000, seed: int = 0,
                         alpha: float = 0.01, oracle: MarginalOracle = BES3) -> KSReport:
    """KS test of the scaled half gap at time 1 against ``oracle``.

    Pass ``oracle=HALF_NORMAL`` for the negative control.
    """
    _check_experiment(n_steps, trials, seed)
    samples = bessel_samples(n_steps, trials, seed)
    if np.any(samples <= 0):
        raise AssertionError("gap must stay positive")
    return ks_test(samples, oracle, alpha, experiment="bessel", n_steps=n_steps,
                   trials=trials, seed=seed, t=1.0)


def mc_reflected_bm_experiment(n_steps: int = 10_000, trials: int = 20_000, seed: int = 0,
                               alpha: float = 0.01,
                               oracle: MarginalOracle = HALF_NORMAL) -> dict[str, KSReport]:
    """KS tests of both scaled gaps between ``M`` and the reflected walks."""
    _check_experiment(n_steps, trials, seed)
    reports = {}
    for name, samples in reflected_bm_samples(n_steps, trials, seed).items():
        if np.any(samples <= 0):
            raise AssertionError(f"{name} must stay positive")
        reports[name] = ks_test(samples, oracle, alpha, experiment=name,
                                n_steps=n_steps, trials=trials, seed=seed, t=1.0)
    return reports


def transition_counts(kdp: np.ndarray) -> dict[tuple[int, int], dict[tuple[int, int, int], int]]:
    """Observed ``(d, p) -> (dk, d', p')`` counts from ``(trials, steps+1, 3)`` states."""
    k, d, p = (kdp[:, :-1, i].ravel() for i in range(3))
    dk = (kdp[:, 1:, 0] - kdp[:, :-1, 0]).ravel()
    d2, p2 = kdp[:, 1:, 1].ravel(), kdp[:, 1:, 2].ravel()
    rows = np.stack([d, p, dk, d2, p2], axis=1)
    uniq, cnt = np.unique(rows, axis=0, return_counts=True)
    out: dict = {}
    for (a, b, c, e, f), n in zip(uniq.tolist(), cnt.tolist()):
        out.setdefault((a, b), {})[(c, e, f)] = n
    return out


def chi_square_agreement(n_steps: int = 1000, trials: int = 1000, seed: int = 0,
                         alpha: float = 0.01, min_expected: float = 5.0) -> dict:
    """Pooled chi-square test of simulated one-step frequencies.

    Every visited ``(d, p)`` whose visit count gives each outcome an expected
    count of at least ``min_expected`` contributes ``sum (O - E)^2 / E`` with
    ``(#outcomes - 1)`` degrees of freedom; the remaining visits are counted
    but only checked for outcomes outside the exact support.
    """
    check_seed(seed)
    kdp = simulate_kdp_batch(n_steps, trials, seed)
    counts = transition_counts(kdp)
    chi2 = 0.0
    dof = 0
    used = skipped = 0
    states = off_support = 0
    for (d, p), obs in counts.items():
        law = kdp_step_distribution(d, p)
        visits = sum(obs.values())
        off_support += sum(n for key, n in obs.items() if key not in law)
        if visits * min(law.values()) < min_expected:
            skipped += visits
            continue
        used += visits
        states += 1
        for key, prob in law.items():
            expected = visits * float(prob)
            chi2 += (obs.get(key, 0) - expected) ** 2 / expected
        dof += len(law) - 1
    p_value = float(stats.chi2.sf(chi2, dof)) if dof else float("nan")
    return {
        "check": "simulator-oracle agreement",
        "params": {"n_steps": n_steps, "trials": trials, "seed": seed, "alpha": alpha},
        "visits": used + skipped,
        "visits_tested": used,
        "visits_sparse": skipped,
        "off_support": off_support,
        "states_tested": states,
        "chi_square": chi2,
        "dof": dof,
        "p_value": p_value,
        "pass": off_support == 0 and dof > 0 and p_value > alpha,
    }
