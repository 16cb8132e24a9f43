"""Exception types shared across the package."""


class ScrilabError(Exception):
    """Base class for all scrilab errors."""


class ChartDomainError(ScrilabError, ValueError):
    """Input outside the domain of a coordinate map (e.g. r <= 2m)."""


class ChartRangeError(ScrilabError, ValueError):
    """Resulting point falls outside the compactified chart."""


class DegenerateMetricError(ScrilabError, ValueError):
    """Metric is degenerate or has lost Lorentzian signature."""


class AdmissibilityError(ScrilabError, ValueError):
    """Modification-pair or weight parameters violate their constraints."""


class SolverError(ScrilabError, RuntimeError):
    """Numerical evolution failed (NaN, instability, divergence)."""


class ConfigError(ScrilabError, ValueError):
    """Run configuration failed validation."""
