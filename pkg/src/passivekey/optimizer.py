"""Outer search over (mu, p_pe) and distance scans.

The objective R(mu, p_pe) contains clamps, a min over x, and a root-finder,
so it is only piecewise smooth; a deterministic coarse grid followed by
shrinking-rectangle refinement is used instead of gradient methods.  The
source intensity is capped below the divergence threshold of the
sqrt(delta_k p_k) series, mu < (1 - eta_A) / eta_A, with a safety margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .channel import ChannelModel, simulate_observables
from .errors import AllVacuous
from .keylength import KeyLengthResult, SecurityBudget, asymptotic_rate, key_length
from .photonics import SourceModel

MU_SAFETY = 0.99


@dataclass(frozen=True)
class OptimizationSpec:
    """Grid sizes and bounds for the (mu, p_pe) search.

    mu_bounds defaults to [0.01, MU_SAFETY * (1 - eta_A) / eta_A] (cap at the
    series-divergence threshold); p_pe_bounds to [0.01, 0.99].
    """

    mu_bounds: tuple[float, float] | None = None
    p_pe_bounds: tuple[float, float] = (0.01, 0.99)
    coarse_points: tuple[int, int] = (24, 24)
    refine_rounds: int = 3
    refine_points: tuple[int, int] = (7, 7)
    x_grid_points: int = 200

    def resolved_mu_bounds(self, eta_A: float) -> tuple[float, float]:
        if self.mu_bounds is not None:
            lo, hi = self.mu_bounds
        else:
            lo, hi = 0.01, math.inf
        cap = MU_SAFETY * (1.0 - eta_A) / eta_A if eta_A > 0 else math.inf
        hi = min(hi, cap)
        if not hi > lo:
            raise ValueError(f"empty mu range [{lo}, {hi}] for eta_A={eta_A}")
        return lo, hi


@dataclass(frozen=True)
class OptimizeResult:
    rate: float
    mu: float
    p_pe: float
    result: KeyLengthResult


def _rate_at(mu, p_pe, L_km, N, src, ch, sec, spec) -> KeyLengthResult:
    src_mu = replace(src, mu=float(mu))
    ch_L = replace(ch, L_km=float(L_km))
    obs = simulate_observables(src_mu, ch_L)
    return key_length(src_mu, obs, N, float(p_pe), sec,
                      grid_points=spec.x_grid_points)


def optimize_rate(
    L_km: float,
    N: float,
    src: SourceModel,
    ch: ChannelModel,
    sec: SecurityBudget,
    spec: OptimizationSpec = OptimizationSpec(),
) -> OptimizeResult:
    """Maximal rate over (mu, p_pe) at fixed distance and pulse count.

    Coarse grid, then shrinking rectangles around the incumbent; the result
    never falls below the best coarse-grid value.  Raises AllVacuous when no
    grid point yields a positive key.
    """
    mu_lo, mu_hi = spec.resolved_mu_bounds(src.eta_A)
    pp_lo, pp_hi = spec.p_pe_bounds

    best = None  # (rate, mu, p_pe, KeyLengthResult)

    def scan(mus, ppes):
        nonlocal best
        for mu in mus:
            for pp in ppes:
                res = _rate_at(mu, pp, L_km, N, src, ch, sec, spec)
                if best is None or res.rate > best[0]:
                    best = (res.rate, float(mu), float(pp), res)

    scan(np.linspace(mu_lo, mu_hi, spec.coarse_points[0]),
         np.linspace(pp_lo, pp_hi, spec.coarse_points[1]))
    if best is None or best[0] <= 0.0:
        raise AllVacuous(f"no positive key on the grid at L={L_km} km, N={N:g}")

    mu_step = (mu_hi - mu_lo) / max(spec.coarse_points[0] - 1, 1)
    pp_step = (pp_hi - pp_lo) / max(spec.coarse_points[1] - 1, 1)
    for _ in range(spec.refine_rounds):
        _, mu0, pp0, _ = best
        scan(
            np.linspace(max(mu_lo, mu0 - mu_step), min(mu_hi, mu0 + mu_step),
                        spec.refine_points[0]),
            np.linspace(max(pp_lo, pp0 - pp_step), min(pp_hi, pp0 + pp_step),
                        spec.refine_points[1]),
        )
        mu_step /= 3.0
        pp_step /= 3.0

    rate, mu, pp, res = best
    return OptimizeResult(rate=rate, mu=mu, p_pe=pp, result=res)


def max_distance(
    N: float,
    src: SourceModel,
    ch: ChannelModel,
    sec: SecurityBudget,
    spec: OptimizationSpec = OptimizationSpec(),
    step_km: float = 1.0,
    L_max_km: float = 250.0,
) -> float:
    """Largest distance with a positive optimized rate, bisected to 0.1 km.

    Returns 0 when even L = 0 yields no key.
    """
    if step_km <= 0:
        raise ValueError("step_km must be > 0")

    def positive(L):
        try:
            return optimize_rate(L, N, src, ch, sec, spec).rate > 0.0
        except AllVacuous:
            return False

    if not positive(0.0):
        return 0.0
    lo = 0.0
    hi = None
    L = step_km
    while L <= L_max_km:
        if positive(L):
            lo = L
        else:
            hi = L
            break
        L += step_km
    if hi is None:
        return lo
    while hi - lo > 0.1:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class SweepRow:
    L_km: float
    N: float
    mode: str
    mu_opt: float
    p_pe_opt: float
    x_opt: float
    ell_T: float
    ell_B: float
    ell: float
    rate: float
    e_p_t: float
    e_p_nt: float
    status: str


def sweep_point(
    L_km: float,
    N: float,
    mode: str,
    src: SourceModel,
    ch: ChannelModel,
    sec: SecurityBudget,
    spec: OptimizationSpec = OptimizationSpec(),
    p_pe_override: float | None = None,
) -> SweepRow:
    """One (L, N) row; vacuous points are reported, not raised."""
    if mode == "asymptotic":
        best_rate = 0.0
        best_mu = math.nan
        mu_lo, mu_hi = spec.resolved_mu_bounds(src.eta_A)
        for mu in np.linspace(mu_lo, mu_hi, spec.coarse_points[0]):
            r = asymptotic_rate(
                SourceModel(float(mu), src.eta_A, src.d_A),
                ChannelModel(ch.alpha_db_per_km, L_km, ch.eta_B, ch.p_d, ch.e_d),
                f_EC=sec.f_EC,
            )
            if r > best_rate:
                best_rate, best_mu = r, float(mu)
        step = (mu_hi - mu_lo) / (spec.coarse_points[0] - 1)
        if best_rate > 0.0:
            for _ in range(spec.refine_rounds):
                for mu in np.linspace(max(mu_lo, best_mu - step),
                                      min(mu_hi, best_mu + step),
                                      spec.refine_points[0]):
                    r = asymptotic_rate(
                        SourceModel(float(mu), src.eta_A, src.d_A),
                        ChannelModel(ch.alpha_db_per_km, L_km, ch.eta_B,
                                     ch.p_d, ch.e_d),
                        f_EC=sec.f_EC,
                    )
                    if r > best_rate:
                        best_rate, best_mu = r, float(mu)
                step /= 3.0
        status = "ok" if best_rate > 0.0 else "vacuous"
        return SweepRow(L_km, N, mode, best_mu, math.nan, math.nan,
                        math.nan, math.nan, math.nan, best_rate,
                        math.nan, math.nan, status)

    eff_spec = spec
    if p_pe_override is not None:
        eff_spec = replace(
            spec,
            p_pe_bounds=(p_pe_override, p_pe_override),
            coarse_points=(spec.coarse_points[0], 1),
            refine_points=(spec.refine_points[0], 1),
        )
    try:
        opt = optimize_rate(L_km, N, src, ch, sec, eff_spec)
    except AllVacuous:
        return SweepRow(L_km, N, mode, math.nan, math.nan, math.nan,
                        0.0, 0.0, 0.0, 0.0, math.nan, math.nan, "vacuous")
    res = opt.result
    x_opt = res.x_opt_T if res.ell_T >= res.ell_B else res.x_opt_B
    return SweepRow(
        L_km, N, mode, opt.mu, opt.p_pe, x_opt,
        res.ell_T, res.ell_B, res.ell, res.rate,
        res.diagnostics.e_p_t, res.diagnostics.e_p_nt, "ok",
    )


def sweep(
    distances: Sequence[float],
    Ns: Sequence[float],
    mode: str,
    src: SourceModel,
    ch: ChannelModel,
    sec: SecurityBudget,
    spec: OptimizationSpec = OptimizationSpec(),
    p_pe_override: float | None = None,
) -> list[SweepRow]:
    """Rows for every (L, N) pair, in input order; mode is finite | asymptotic | both."""
    if not distances or not Ns:
        raise ValueError("distances and Ns must be nonempty")
    modes = ["finite", "asymptotic"] if mode == "both" else [mode]
    rows = []
    for L in distances:
        for N in Ns:
            for m in modes:
                rows.append(sweep_point(L, N, m, src, ch, sec, spec,
                                        p_pe_override=p_pe_override))
    return rows
