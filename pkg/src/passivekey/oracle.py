"""Statistical ground-truth harness for the concentration bounds.

Everything here is deliberately independent of the key-rate chain: exact
hypergeometric tails summed in log space, and seeded Monte Carlo
sampling-without-replacement experiments with true integer counts.  The
experiments replay the two statistical claims the engine relies on:

* the phase-error bound: the unobserved code-part error fraction exceeds
  the bound computed from the sampled part with probability far below the
  secrecy target;
* the two-sample yield concentration: the triggered/nontriggered split of a
  fixed population keeps the two empirical means within the Serfling width
  xi, except with probability at most eps.

RNG: numpy PCG64, seeded; every report carries the algorithm identifier so
runs replay exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decoy_bounds import serfling_xi
from .phase_error import PhaseErrorInputs, phase_error_bound

RNG_ALGORITHM = "numpy-PCG64"


@dataclass(frozen=True)
class Population:
    """A finite population with a count of marked (error) items."""

    size: int
    errors: int
    rng_seed: int

    def __post_init__(self):
        if not 0 <= self.errors <= self.size:
            raise ValueError("errors must be in [0, size]")


@dataclass(frozen=True)
class TrialReport:
    """Outcome of a Monte Carlo bound check."""

    violations: int
    trials: int
    rate: float
    bound: float                 # the probability the claim allows
    ci_upper_95: float           # one-sided Clopper-Pearson 95% upper CI
    seed: int
    rng: str = RNG_ALGORITHM


def _log_binom(n: int, k) -> np.ndarray:
    n_arr = np.asarray(n, dtype=float)
    k_arr = np.asarray(k, dtype=float)
    from scipy.special import gammaln

    return gammaln(n_arr + 1) - gammaln(k_arr + 1) - gammaln(n_arr - k_arr + 1)


def _ci_upper_95(violations: int, trials: int) -> float:
    """One-sided 95% Clopper-Pearson upper bound on the failure probability."""
    if violations >= trials:
        return 1.0
    from scipy.stats import beta

    return float(beta.ppf(0.95, violations + 1, trials - violations))


def hypergeom_tail(
    pop_size: int, marked: int, draw: int, threshold: int, direction: str = "forward"
) -> float:
    """P[X >= threshold] for X ~ Hypergeometric(pop_size, marked, draw), exactly.

    Terms are accumulated from log-space pmf values; direction selects
    ascending ("forward") or descending ("backward") summation order, which
    must agree to ~1e-12 and serves as a self-check.
    """
    if not 0 <= marked <= pop_size:
        raise ValueError("marked must be in [0, pop_size]")
    if not 0 <= draw <= pop_size:
        raise ValueError("draw must be in [0, pop_size]")
    k_lo = max(threshold, 0, draw - (pop_size - marked))
    k_hi = min(draw, marked)
    if k_lo > k_hi:
        return 0.0
    ks = np.arange(k_lo, k_hi + 1)
    log_pmf = (
        _log_binom(marked, ks)
        + _log_binom(pop_size - marked, draw - ks)
        - _log_binom(pop_size, draw)
    )
    terms = np.exp(log_pmf)
    if direction == "backward":
        terms = terms[::-1]
    elif direction != "forward":
        raise ValueError("direction must be 'forward' or 'backward'")
    return float(min(np.sum(terms), 1.0))


def check_lemma3(
    n: int, l: int, true_error_fraction: float, eps_sec: float,
    trials: int, seed: int,
) -> TrialReport:
    """Empirical failure rate of the phase-error bound on random splits.

    A population of n + l bits with floor((n+l) * fraction) errors is split
    uniformly into a sample part (l bits, observed) and a code part
    (n bits, hidden); a violation is a trial whose hidden error fraction
    exceeds the bound computed from the observed one.
    """
    total = n + l
    marked = int(math.floor(total * true_error_fraction))
    rng = np.random.default_rng(seed)
    if n == 0:
        # everything sampled: nothing left to predict, no violations possible
        return TrialReport(0, trials, 0.0, eps_sec, 0.0, seed)
    c = rng.hypergeometric(marked, total - marked, l, size=trials)

    violations = 0
    for c_val, count in zip(*np.unique(c, return_counts=True)):
        e_ob = min(c_val / l, 0.5)
        e_p = phase_error_bound(
            PhaseErrorInputs(n=float(n), l=float(l), e_ob=e_ob, eps_sec=eps_sec)
        )
        if (marked - int(c_val)) / n > e_p:
            violations += int(count)
    rate = violations / trials
    return TrialReport(violations, trials, rate, eps_sec,
                       _ci_upper_95(violations, trials), seed)


def check_lemma4(
    n1: int, n2: int, outcome_rate: float, eps: float, trials: int, seed: int
) -> TrialReport:
    """Empirical exceedance of the two-sample concentration width xi.

    Each trial draws a population of n1 + n2 independent binary outcomes at
    the given rate, splits it uniformly into parts of size n1 and n2, and
    counts a hit when |mean1 - mean2| / 2 exceeds xi(eps, n1, n2).
    """
    xi = serfling_xi(eps, n1, n2)
    rng = np.random.default_rng(seed)
    total = n1 + n2
    successes = rng.binomial(total, outcome_rate, size=trials)
    k1 = rng.hypergeometric(successes, total - successes, n1)
    mean1 = k1 / n1
    mean2 = (successes - k1) / n2
    violations = int(np.count_nonzero(np.abs(mean1 - mean2) / 2.0 > xi))
    rate = violations / trials
    return TrialReport(violations, trials, rate, eps,
                       _ci_upper_95(violations, trials), seed)
