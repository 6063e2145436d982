"""Exception hierarchy for the passive decoy-state key-rate engine."""


class PassiveKeyError(Exception):
    """Base class for all engine-specific failures."""


class DegenerateDetector(PassiveKeyError):
    """Heralding detector certainly triggers (gamma_n = 1); delta_n is undefined."""


class NoConvergence(PassiveKeyError):
    """A photon-number series did not pass the geometric-tail test within the index cap."""


class DivergentSeries(PassiveKeyError):
    """The sqrt(delta_k p_k) series diverges for this (mu, eta_A) combination."""


class ZeroGain(PassiveKeyError):
    """Nontriggered gain is zero; ratios of gains are undefined."""


class VacuousBound(PassiveKeyError):
    """The certified single-photon bound is vacuous at this x (denominator or zeta <= 0)."""


class NoSolution(PassiveKeyError):
    """The Gaussian-tail condition cannot be met within the search bracket."""


class AllVacuous(PassiveKeyError):
    """Every point of an optimization grid yielded zero key."""


class ConfigError(PassiveKeyError):
    """A run configuration file failed to parse or validate."""
