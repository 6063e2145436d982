"""Fiber channel model producing the four measured observables.

Simulation mode evaluates, term by photon number, the expected overall gains
and QBERs of the triggered and nontriggered pulse classes for a fiber of
given length; analysis mode is simply constructing :class:`Observables`
from experimentally measured values and skipping this module.

The expectation values are exact (finite-size fluctuation of the
observables themselves is deliberately not modeled); all finite-key
statistics enter later, in the decoy bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

from .photonics import (
    DEFAULT_REL_TOL,
    SourceModel,
    nontrigger_prob,
    photon_prob,
    series_sum,
)

QBER_SLACK = 1e-9


@dataclass(frozen=True)
class ChannelModel:
    """Fiber and receiver parameters.

    Attributes
    ----------
    alpha_db_per_km : float
        Fiber attenuation in dB/km, >= 0.
    L_km : float
        Fiber length in km, >= 0.
    eta_B : float
        Receiver detection efficiency, in (0, 1].
    p_d : float
        Receiver dark-count probability per pulse, in [0, 1).
    e_d : float
        Optical misalignment error probability, in [0, 0.5].
    """

    alpha_db_per_km: float
    L_km: float
    eta_B: float
    p_d: float
    e_d: float

    def __post_init__(self):
        if self.alpha_db_per_km < 0:
            raise ValueError("alpha_db_per_km must be >= 0")
        if self.L_km < 0:
            raise ValueError("L_km must be >= 0")
        if not 0 < self.eta_B <= 1:
            raise ValueError("eta_B must be in (0, 1]")
        if not 0 <= self.p_d < 1:
            raise ValueError("p_d must be in [0, 1)")
        if not 0 <= self.e_d <= 0.5:
            raise ValueError("e_d must be in [0, 0.5]")


@dataclass(frozen=True)
class Observables:
    """Overall gains and QBERs of the two heralding classes.

    Q_t / Q_nt are the triggered / nontriggered per-pulse gains; E_t / E_nt
    the corresponding QBERs.
    """

    Q_t: float
    Q_nt: float
    E_t: float
    E_nt: float

    def __post_init__(self):
        for name in ("Q_t", "Q_nt"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        for name in ("E_t", "E_nt"):
            v = getattr(self, name)
            if not 0 <= v <= 0.5 + QBER_SLACK:
                raise ValueError(f"{name} must be in [0, 0.5], got {v}")


def transmittance(ch: ChannelModel) -> float:
    """Overall transmittance eta = 10^(-alpha L / 10) * eta_B."""
    return 10.0 ** (-ch.alpha_db_per_km * ch.L_km / 10.0) * ch.eta_B


def simulate_observables(
    src: SourceModel, ch: ChannelModel, rel_tol: float = DEFAULT_REL_TOL
) -> Observables:
    """Expected (Q_t, Q_nt, E_t, E_nt) for this source and channel.

    Per photon number n, the receiver clicks with probability
    ``1 - (1-eta)^n (1-p_d)^2`` and the error weight is that click
    probability minus ``(1-p_d)[(1 - eta e_d)^n - (1 - eta + eta e_d)^n]``,
    halved in the QBER.  The n-sums are truncated by the certified
    geometric-tail rule.
    """
    eta = transmittance(ch)
    pd2 = (1.0 - ch.p_d) ** 2

    def click(n: int) -> float:
        return 1.0 - (1.0 - eta) ** n * pd2

    def err(n: int) -> float:
        return click(n) - (1.0 - ch.p_d) * (
            (1.0 - eta * ch.e_d) ** n - (1.0 - eta + eta * ch.e_d) ** n
        )

    def w_t(n: int) -> float:
        return photon_prob(src, n) * (1.0 - nontrigger_prob(src, n))

    def w_nt(n: int) -> float:
        return photon_prob(src, n) * nontrigger_prob(src, n)

    q_t = series_sum(lambda n: w_t(n) * click(n), rel_tol).value
    q_nt = series_sum(lambda n: w_nt(n) * click(n), rel_tol).value
    s_et = series_sum(lambda n: w_t(n) * err(n), rel_tol).value
    s_ent = series_sum(lambda n: w_nt(n) * err(n), rel_tol).value

    e_t = s_et / (2.0 * q_t) if q_t > 0 else 0.0
    e_nt = s_ent / (2.0 * q_nt) if q_nt > 0 else 0.0
    return Observables(Q_t=q_t, Q_nt=q_nt, E_t=min(e_t, 0.5), E_nt=min(e_nt, 0.5))
