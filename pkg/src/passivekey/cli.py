"""Command-line entry point.

``passivekey run`` evaluates finite-key and asymptotic rate sweeps over
(distance, pulse-count) grids and writes one CSV row per point;
``passivekey verify`` runs the seeded Monte Carlo oracle suite against the
concentration bounds and writes a plain-text report plus a CSV of violation
counts.

Configuration is an INI-style file of ``key = value`` lines under section
headers; every key has an embedded default (the reference experimental
parameters), so an empty config reproduces the standard setup.  Command
line flags override the file.

Exit codes: 0 success, 2 configuration error, 3 internal numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .channel import ChannelModel
from .errors import ConfigError, PassiveKeyError
from .keylength import SecurityBudget
from .optimizer import OptimizationSpec, SweepRow, sweep_point
from .oracle import RNG_ALGORITHM, check_lemma3, check_lemma4
from .photonics import SourceModel

CSV_HEADER = "L_km,N,mode,mu_opt,p_pe_opt,x_opt,ell_T,ell_B,ell,rate,e_p_t,e_p_nt,status"

DEFAULTS = {
    "source": {"mu": "0.5", "eta_A": "0.5", "d_A": "1e-6"},
    "channel": {"alpha_db_per_km": "0.20", "eta_B": "0.1", "p_d": "6e-7",
                "e_d": "0.005"},
    "security": {"eps_sec": "1e-10", "eps_cor": "1e-12", "f_EC": "1.16"},
    "sweep": {"distances": "10:220:10", "Ns": "1e13", "mode": "finite",
              "p_pe": ""},
    "optimizer": {"mu_min": "0.01", "mu_max": "", "p_pe_min": "0.01",
                  "p_pe_max": "0.99", "coarse_mu": "24", "coarse_p_pe": "24",
                  "refine_rounds": "3", "refine_mu": "7", "refine_p_pe": "7",
                  "x_grid_points": "200"},
    "output": {"path": "sweep.csv"},
    "verify": {"seed": "1", "trials": "100000", "path": "verify.csv"},
}


@dataclass
class RunConfig:
    source: SourceModel = None
    channel: ChannelModel = None
    security: SecurityBudget = None
    spec: OptimizationSpec = None
    distances: list = field(default_factory=list)
    Ns: list = field(default_factory=list)
    mode: str = "finite"
    p_pe_override: float | None = None
    out_path: str = "sweep.csv"
    verify_seed: int = 1
    verify_trials: int = 100_000
    verify_path: str = "verify.csv"


def _parse_distances(text: str) -> list[float]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"distance range must be L0:L1:step, got {text!r}")
        l0, l1, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("distance step must be > 0")
        out = []
        L = l0
        while L <= l1 + 1e-9:
            out.append(round(L, 9))
            L += step
        return out
    return [float(p) for p in text.split(",") if p.strip()]


def load_config(path: str | None, overrides: argparse.Namespace | None = None) -> RunConfig:
    """Defaults, then the config file, then command-line overrides."""
    parser = configparser.ConfigParser()
    parser.read_dict(DEFAULTS)
    if path is not None:
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"config parse error in {path!r}: {exc}") from exc

    def fval(section, key):
        raw = parser.get(section, key)
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from exc

    cfg = RunConfig()
    try:
        cfg.source = SourceModel(mu=fval("source", "mu"),
                                 eta_A=fval("source", "eta_A"),
                                 d_A=fval("source", "d_A"))
        cfg.channel = ChannelModel(alpha_db_per_km=fval("channel", "alpha_db_per_km"),
                                   L_km=0.0,
                                   eta_B=fval("channel", "eta_B"),
                                   p_d=fval("channel", "p_d"),
                                   e_d=fval("channel", "e_d"))
        cfg.security = SecurityBudget(eps_sec=fval("security", "eps_sec"),
                                      eps_cor=fval("security", "eps_cor"),
                                      f_EC=fval("security", "f_EC"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    mu_max_raw = parser.get("optimizer", "mu_max").strip()
    cfg.spec = OptimizationSpec(
        mu_bounds=(fval("optimizer", "mu_min"), float(mu_max_raw))
        if mu_max_raw else None,
        p_pe_bounds=(fval("optimizer", "p_pe_min"), fval("optimizer", "p_pe_max")),
        coarse_points=(parser.getint("optimizer", "coarse_mu"),
                       parser.getint("optimizer", "coarse_p_pe")),
        refine_rounds=parser.getint("optimizer", "refine_rounds"),
        refine_points=(parser.getint("optimizer", "refine_mu"),
                       parser.getint("optimizer", "refine_p_pe")),
        x_grid_points=parser.getint("optimizer", "x_grid_points"),
    )

    cfg.distances = _parse_distances(parser.get("sweep", "distances"))
    cfg.Ns = [float(v) for v in parser.get("sweep", "Ns").split(",") if v.strip()]
    cfg.mode = parser.get("sweep", "mode").strip()
    ppe_raw = parser.get("sweep", "p_pe").strip()
    cfg.p_pe_override = float(ppe_raw) if ppe_raw else None
    cfg.out_path = parser.get("output", "path")
    cfg.verify_seed = parser.getint("verify", "seed")
    cfg.verify_trials = parser.getint("verify", "trials")
    cfg.verify_path = parser.get("verify", "path")

    if overrides is not None:
        if getattr(overrides, "mode", None):
            cfg.mode = overrides.mode
        if getattr(overrides, "sweep", None):
            cfg.distances = _parse_distances(overrides.sweep)
        if getattr(overrides, "N", None):
            cfg.Ns = [float(v) for v in overrides.N]
        if getattr(overrides, "out", None):
            cfg.out_path = overrides.out
        if getattr(overrides, "p_pe", None) is not None:
            cfg.p_pe_override = overrides.p_pe

    if cfg.mode not in ("finite", "asymptotic", "both"):
        raise ConfigError(f"mode must be finite|asymptotic|both, got {cfg.mode!r}")
    if not cfg.distances:
        raise ConfigError("empty distance list")
    if sorted(cfg.distances) != cfg.distances or any(L < 0 for L in cfg.distances):
        raise ConfigError("distances must be nonnegative and ascending")
    if not cfg.Ns:
        raise ConfigError("empty N list")
    return cfg


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return format(value, ".17g")


def format_row(row: SweepRow) -> str:
    return ",".join(_fmt(v) for v in (
        row.L_km, row.N, row.mode, row.mu_opt, row.p_pe_opt, row.x_opt,
        row.ell_T, row.ell_B, row.ell, row.rate, row.e_p_t, row.e_p_nt,
        row.status,
    ))


def _row_task(args) -> SweepRow:
    L, N, mode, cfg = args
    return sweep_point(L, N, mode, cfg.source, cfg.channel, cfg.security,
                       cfg.spec, p_pe_override=cfg.p_pe_override)


def run(cfg: RunConfig, workers: int = 1) -> int:
    modes = ["finite", "asymptotic"] if cfg.mode == "both" else [cfg.mode]
    tasks = [(L, N, m, cfg) for L in cfg.distances for N in cfg.Ns for m in modes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row_task, tasks))
    else:
        rows = [_row_task(t) for t in tasks]
    with open(cfg.out_path, "w", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(format_row(row) + "\n")
    return 0


def run_verify(cfg: RunConfig, report_stream=None) -> int:
    stream = report_stream if report_stream is not None else sys.stdout
    seed = cfg.verify_seed
    trials = cfg.verify_trials
    lines = []
    csv_rows = ["check,n_or_n1,l_or_n2,rate_or_fraction,eps,violations,trials,"
                "observed_rate,ci_upper_95,seed,rng"]

    ok = True
    r3 = check_lemma3(n=500, l=500, true_error_fraction=0.03, eps_sec=1e-3,
                      trials=trials, seed=seed)
    passed = r3.rate <= r3.bound
    ok &= passed
    lines.append(
        f"phase-error sampling bound  n=500 l=500 fraction=0.03 eps=1e-03: "
        f"{r3.violations}/{r3.trials} violations "
        f"(rate {r3.rate:.2e}, allowed {r3.bound:.0e}) "
        f"{'PASS' if passed else 'FAIL'}"
    )
    csv_rows.append(f"lemma3,500,500,0.03,0.001,{r3.violations},{r3.trials},"
                    f"{_fmt(r3.rate)},{_fmt(r3.ci_upper_95)},{seed},{r3.rng}")

    for n1 in (100, 1000, 10000):
        for n2 in (100, 1000, 10000):
            for eps in (0.1, 0.01):
                r4 = check_lemma4(n1, n2, outcome_rate=0.1, eps=eps,
                                  trials=trials, seed=seed)
                passed = r4.rate <= eps
                ok &= passed
                lines.append(
                    f"two-sample split width     n1={n1:<5} n2={n2:<5} "
                    f"eps={eps:g}: {r4.violations}/{r4.trials} exceedances "
                    f"(rate {r4.rate:.2e}) {'PASS' if passed else 'FAIL'}"
                )
                csv_rows.append(
                    f"lemma4,{n1},{n2},0.1,{_fmt(eps)},{r4.violations},"
                    f"{r4.trials},{_fmt(r4.rate)},{_fmt(r4.ci_upper_95)},"
                    f"{seed},{r4.rng}"
                )

    stream.write(f"oracle verification  seed={seed} trials={trials} rng={RNG_ALGORITHM}\n")
    for line in lines:
        stream.write(line + "\n")
    stream.write("RESULT: " + ("PASS" if ok else "FAIL") + "\n")
    with open(cfg.verify_path, "w", newline="\n") as fh:
        fh.write("\n".join(csv_rows) + "\n")
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="passivekey",
        description="Finite-key secret-key rates for passive decoy-state BB84 "
                    "with an SPDC source.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate a rate sweep and write CSV")
    p_run.add_argument("--config", default=None, help="INI config file")
    p_run.add_argument("--mode", choices=["finite", "asymptotic", "both"])
    p_run.add_argument("--sweep", metavar="L0:L1:STEP",
                       help="distance grid in km (or comma list)")
    p_run.add_argument("--N", action="append",
                       help="total pulse count; repeatable")
    p_run.add_argument("--p-pe", dest="p_pe", type=float, default=None,
                       help="pin the parameter-estimation fraction")
    p_run.add_argument("--out", help="output CSV path")
    p_run.add_argument("--workers", type=int, default=1)

    p_ver = sub.add_parser("verify", help="run the Monte Carlo oracle suite")
    p_ver.add_argument("--config", default=None)
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--trials", type=int, default=None)
    p_ver.add_argument("--out", help="violation-count CSV path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, overrides=args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            return run(cfg, workers=args.workers)
        if args.command == "verify":
            if args.seed is not None:
                cfg.verify_seed = args.seed
            if args.trials is not None:
                cfg.verify_trials = args.trials
            if args.out:
                cfg.verify_path = args.out
            return run_verify(cfg)
    except PassiveKeyError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
