"""Finite-key bounds on single-photon gains and error rates.

The yield and QBER of the triggered and nontriggered n-photon classes are
related by a sampling-without-replacement concentration bound; combining it
with the odds ratios delta_n yields a lower bound zeta(x) on the
nontriggered single-photon gain fraction and upper bounds W_t(x), W_nt(x)
on the single-photon error rates, all parametrized by the unknown vacuum
ratio x = Q0_nt / Q_nt.  The asymptotic (infinite-sample) counterparts are
provided as the N -> infinity reference.

Scalar entry points raise the documented errors on vacuous preconditions;
the array-valued helpers used by the key-length minimizer return raw values
and leave clamping to the caller, which needs the unclamped shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Observables
from .errors import DegenerateDetector, VacuousBound, ZeroGain
from .photonics import (
    SourceModel,
    delta_n,
    photon_prob,
    sqrt_delta_p_low_orders,
    sqrt_delta_p_sum,
)


@dataclass(frozen=True)
class SampleBudget:
    """Finite-size sampling parameters.

    Attributes
    ----------
    N : float
        Total pulses emitted by the source (accepted as a real number; the
        engine works with expected counts).
    p_pe : float
        Probability that a pulse is assigned to parameter estimation.
    eps_pe : float
        Failure probability of the yield/error estimation, shared across
        photon numbers.
    """

    N: float
    p_pe: float
    eps_pe: float

    def __post_init__(self):
        if not self.N >= 1:
            raise ValueError("N must be >= 1")
        if not 0 < self.p_pe < 1:
            raise ValueError("p_pe must be in (0, 1)")
        if not 0 < self.eps_pe < 1:
            raise ValueError("eps_pe must be in (0, 1)")


@dataclass(frozen=True)
class SinglePhotonBounds:
    """Raw bound values at one (or an array of) vacuum-ratio x."""

    x: object
    zeta: object
    q1_t_lb: object
    w_t: object          # may be +inf where the denominator is vacuous
    w_nt: object         # may be +inf where zeta <= 0
    chi: float
    chi0: float
    chi1: float


def serfling_xi(eps: float, n1: float, n2: float) -> float:
    """Two-sample concentration width xi = sqrt((n1+n2)(n1+1) ln(1/eps) / (8 n1^2 n2)).

    This is the exact form; the chi closed form used in the key-rate chain
    absorbs the (n1+1) ~ n1 simplification.
    """
    if not (n1 >= 1 and n2 >= 1):
        raise ValueError("n1 and n2 must be >= 1")
    if not 0 < eps <= 1:
        raise ValueError("eps must be in (0, 1]")
    return math.sqrt((n1 + n2) * (n1 + 1) * math.log(1.0 / eps) / (8.0 * n1**2 * n2))


def overall_delta(obs: Observables) -> float:
    """Ratio delta = Q_t / Q_nt of the overall gains."""
    if obs.Q_nt == 0:
        raise ZeroGain("Q_nt = 0; overall delta undefined")
    return obs.Q_t / obs.Q_nt


def chi_term(src: SourceModel, budget: SampleBudget, i: int) -> float:
    """Per-order fluctuation chi_i = sqrt(delta_i p_i ln(1/eps_pe) / (2 N p_pe))."""
    if i not in (0, 1):
        raise ValueError("i must be 0 or 1")
    return math.sqrt(
        delta_n(src, i)
        * photon_prob(src, i)
        * math.log(1.0 / budget.eps_pe)
        / (2.0 * budget.N * budget.p_pe)
    )


def _chi_from_sum(budget: SampleBudget, obs: Observables, s: float) -> float:
    if obs.Q_nt == 0:
        raise ZeroGain("Q_nt = 0; chi undefined")
    return (
        math.sqrt(math.log(1.0 / budget.eps_pe) / (2.0 * budget.N * budget.p_pe))
        * s
        / obs.Q_nt
    )


def chi_total(src: SourceModel, budget: SampleBudget, obs: Observables) -> float:
    """Aggregate fluctuation chi with the full sum over sqrt(delta_k p_k)."""
    return _chi_from_sum(budget, obs, sqrt_delta_p_sum(src))


def chi_low_orders(
    src: SourceModel, budget: SampleBudget, obs: Observables, k_max: int = 2
) -> float:
    """Aggregate fluctuation chi with the sqrt(delta_k p_k) sum cut at k_max.

    The reference key-rate curves are only reproduced with the first three
    orders included; chi_total is the conservative full-series variant.
    """
    return _chi_from_sum(budget, obs, sqrt_delta_p_low_orders(src, k_max))


def _deltas(src: SourceModel) -> tuple[float, float, float]:
    d0, d1, d2 = delta_n(src, 0), delta_n(src, 1), delta_n(src, 2)
    if not d2 > d1:
        raise DegenerateDetector("delta_2 <= delta_1; yield bound undefined (eta_A = 0?)")
    return d0, d1, d2


def zeta_raw(x, src: SourceModel, obs: Observables, chi: float):
    """zeta(x) = [(delta2 - delta) - (delta2 - delta0) x - chi] / (delta2 - delta1).

    Affine and decreasing in x; may be negative.  Accepts scalar or array x.
    """
    d0, d1, d2 = _deltas(src)
    delta = overall_delta(obs)
    return ((d2 - delta) - (d2 - d0) * np.asarray(x, dtype=float) - chi) / (d2 - d1)


def zeta(x: float, src: SourceModel, budget: SampleBudget, obs: Observables) -> float:
    """Lower bound on Q1_nt / Q_nt at vacuum ratio x (raw, caller clamps)."""
    chi = chi_total(src, budget, obs)
    return float(zeta_raw(x, src, obs, chi))


def q1_triggered_lb(
    x: float, src: SourceModel, budget: SampleBudget, obs: Observables
) -> float:
    """Lower bound delta1 * Q_nt * zeta(x) - chi1 on the triggered single-photon gain."""
    chi1 = chi_term(src, budget, 1)
    return float(delta_n(src, 1) * obs.Q_nt * zeta(x, src, budget, obs) - chi1)


def w_t_raw(x, src: SourceModel, obs: Observables, chi: float, chi0: float, chi1: float):
    """Raw W_t(x); +inf where the certified denominator is not positive."""
    d0, d1, _ = _deltas(src)
    delta = overall_delta(obs)
    z = zeta_raw(x, src, obs, chi)
    num = 2.0 * delta * obs.E_t - d0 * np.asarray(x, dtype=float) + chi0 / obs.Q_nt
    den = 2.0 * d1 * z - 2.0 * chi1 / obs.Q_nt
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def w_nt_raw(x, src: SourceModel, obs: Observables, chi: float):
    """Raw W_nt(x) = (2 E_nt - x) / (2 zeta(x)); +inf where zeta(x) <= 0."""
    z = zeta_raw(x, src, obs, chi)
    num = 2.0 * obs.E_nt - np.asarray(x, dtype=float)
    return np.where(z > 0, num / np.where(z > 0, 2.0 * z, 1.0), np.inf)


def e1_triggered_ub(
    x: float, src: SourceModel, budget: SampleBudget, obs: Observables
) -> float:
    """Upper bound W_t(x) on the triggered single-photon error rate."""
    chi = chi_total(src, budget, obs)
    chi0 = chi_term(src, budget, 0)
    chi1 = chi_term(src, budget, 1)
    w = float(w_t_raw(x, src, obs, chi, chi0, chi1))
    if not math.isfinite(w):
        raise VacuousBound(f"W_t denominator <= 0 at x={x}")
    return w


def e1_nontriggered_ub(
    x: float, src: SourceModel, budget: SampleBudget, obs: Observables
) -> float:
    """Upper bound W_nt(x) on the nontriggered single-photon error rate."""
    chi = chi_total(src, budget, obs)
    w = float(w_nt_raw(x, src, obs, chi))
    if not math.isfinite(w):
        raise VacuousBound(f"zeta(x) <= 0 at x={x}")
    return w


def evaluate_bounds(
    x,
    src: SourceModel,
    budget: SampleBudget,
    obs: Observables,
    chi: float | None = None,
) -> SinglePhotonBounds:
    """All raw bound values at x (scalar or array); chi may be precomputed."""
    if chi is None:
        chi = chi_total(src, budget, obs)
    chi0 = chi_term(src, budget, 0)
    chi1 = chi_term(src, budget, 1)
    z = zeta_raw(x, src, obs, chi)
    return SinglePhotonBounds(
        x=x,
        zeta=z,
        q1_t_lb=delta_n(src, 1) * obs.Q_nt * z - chi1,
        w_t=w_t_raw(x, src, obs, chi, chi0, chi1),
        w_nt=w_nt_raw(x, src, obs, chi),
        chi=chi,
        chi0=chi0,
        chi1=chi1,
    )


def x_range(src: SourceModel, obs: Observables) -> tuple[float, float]:
    """Admissible vacuum-ratio interval [0, min(2 E_t delta / delta0, 2 E_nt)]."""
    d0 = delta_n(src, 0)
    delta = overall_delta(obs)
    first = 2.0 * obs.E_t * delta / d0 if d0 > 0 else math.inf
    return (0.0, min(first, 2.0 * obs.E_nt))


def asymptotic_q1_nt(x: float, src: SourceModel, obs: Observables) -> float:
    """Infinite-sample lower bound on Q1_nt at vacuum gain Q0_nt = x * Q_nt."""
    return float(zeta_raw(x, src, obs, 0.0)) * obs.Q_nt


def asymptotic_e1(x: float, src: SourceModel, obs: Observables) -> float:
    """Infinite-sample upper bound on the single-photon error rate (min of two limbs)."""
    d0, d1, _ = _deltas(src)
    delta = overall_delta(obs)
    xi = asymptotic_q1_nt(x, src, obs)
    if not xi > 0:
        raise VacuousBound(f"asymptotic yield bound <= 0 at x={x}")
    q0 = x * obs.Q_nt
    limb_t = (2.0 * delta * obs.E_t * obs.Q_nt - d0 * q0) / (2.0 * d1 * xi)
    limb_nt = (2.0 * obs.E_nt * obs.Q_nt - q0) / (2.0 * xi)
    return min(limb_t, limb_nt)
