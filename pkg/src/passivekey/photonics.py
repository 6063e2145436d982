"""Photon-number statistics of an SPDC source with a heralding threshold detector.

The source emits n photon pairs with thermal statistics
``p_n = mu^n / (1 + mu)^(n+1)``.  One mode hits a threshold detector with
efficiency ``eta_A`` and dark-count rate ``d_A``; the triggering probability
on an n-photon emission is ``gamma_n = 1 - (1 - d_A)(1 - eta_A)^n``.  The
ratio ``delta_n = gamma_n / (1 - gamma_n)`` orders the photon-number classes
and drives every decoy bound downstream.

All functions are pure; the series helpers certify their truncation error
with a geometric tail estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import DegenerateDetector, DivergentSeries, NoConvergence

DEFAULT_REL_TOL = 1e-14
SERIES_INDEX_CAP = 10_000


@dataclass(frozen=True)
class SourceModel:
    """SPDC intensity and heralding-detector parameters.

    Attributes
    ----------
    mu : float
        Mean photon number of the source, > 0.
    eta_A : float
        Heralding detector efficiency, in [0, 1].
    d_A : float
        Heralding dark-count rate per pulse, in [0, 1).
    """

    mu: float
    eta_A: float
    d_A: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if not 0 <= self.eta_A <= 1:
            raise ValueError(f"eta_A must be in [0, 1], got {self.eta_A}")
        if not 0 <= self.d_A < 1:
            raise ValueError(f"d_A must be in [0, 1), got {self.d_A}")


class SeriesSum(NamedTuple):
    value: float
    terms: int


def photon_prob(src: SourceModel, n: int) -> float:
    """Probability p_n = mu^n / (1+mu)^(n+1) of an n-pair emission."""
    if n < 0:
        raise ValueError("n must be >= 0")
    mu = src.mu
    # Evaluated in log space so large n does not overflow before the ratio.
    return math.exp(n * math.log(mu) - (n + 1) * math.log1p(mu))


def nontrigger_prob(src: SourceModel, n: int) -> float:
    """Probability 1 - gamma_n that the heralding detector stays silent.

    Computed directly as (1-d_A)(1-eta_A)^n; never via 1 - trigger_prob,
    which loses all precision once gamma_n is within an ulp of 1.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    return (1.0 - src.d_A) * (1.0 - src.eta_A) ** n


def trigger_prob(src: SourceModel, n: int) -> float:
    """Triggering probability gamma_n = 1 - (1-d_A)(1-eta_A)^n."""
    return 1.0 - nontrigger_prob(src, n)


def delta_n(src: SourceModel, n: int) -> float:
    """Odds ratio delta_n = gamma_n / (1 - gamma_n); strictly increasing in n."""
    q = nontrigger_prob(src, n)
    if q == 0.0:
        raise DegenerateDetector(
            f"gamma_{n} = 1 for eta_A={src.eta_A}, d_A={src.d_A}; delta_{n} undefined"
        )
    return (1.0 - q) / q


def series_sum(
    term: Callable[[int], float],
    rel_tol: float = DEFAULT_REL_TOL,
    index_cap: int = SERIES_INDEX_CAP,
) -> SeriesSum:
    """Sum term(0) + term(1) + ... with a certified geometric tail cutoff.

    Truncates once the running term ratio r falls below 1 and the tail
    estimate |t_n| * r / (1 - r) drops below rel_tol * |partial sum|.
    Two consecutive exactly-zero terms also terminate (an all-zero tail).

    Returns the partial sum and the number of terms taken.  Raises
    NoConvergence if neither condition is met within index_cap terms.
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be > 0")
    total = 0.0
    prev = None
    zeros = 0
    for n in range(index_cap):
        t = term(n)
        total += t
        if t == 0.0:
            zeros += 1
            if zeros >= 2 and n >= 1:
                return SeriesSum(total, n + 1)
        else:
            zeros = 0
        if prev not in (None, 0.0) and t != 0.0:
            r = abs(t) / abs(prev)
            if r < 1.0:
                tail = abs(t) * r / (1.0 - r)
                if tail <= rel_tol * max(abs(total), 1e-300):
                    return SeriesSum(total, n + 1)
        prev = t
    raise NoConvergence(f"series did not converge within {index_cap} terms")


def sqrt_delta_p_sum(src: SourceModel, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Sum over k of sqrt(delta_k * p_k).

    The terms behave like (mu / ((1+mu)(1-eta_A)))^(k/2), so the series
    converges only when mu * eta_A < 1 - eta_A; otherwise the fluctuation
    bound built on it is unusable and DivergentSeries is raised.
    """
    if src.eta_A >= 1.0 or src.mu / ((1.0 + src.mu) * (1.0 - src.eta_A)) >= 1.0:
        raise DivergentSeries(
            f"sqrt(delta_k p_k) diverges for mu={src.mu}, eta_A={src.eta_A}"
        )

    def term(k: int) -> float:
        return math.sqrt(delta_n(src, k) * photon_prob(src, k))

    return series_sum(term, rel_tol).value


def sqrt_delta_p_low_orders(src: SourceModel, k_max: int = 2) -> float:
    """Sum of sqrt(delta_k * p_k) over k = 0..k_max only.

    The key-rate chain uses the first three photon-number orders (the same
    orders that appear in the yield bound); see keylength for rationale.
    """
    return sum(math.sqrt(delta_n(src, k) * photon_prob(src, k)) for k in range(k_max + 1))
