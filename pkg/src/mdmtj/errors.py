"""Exception types shared across the package."""


class ModelError(Exception):
    """Base class for every error this package raises on purpose."""


class ConfigError(ModelError):
    """Base class for configuration problems; the CLI maps these to exit code 3."""


class ConfigParseError(ConfigError):
    """Malformed config text: bad line syntax, unknown key, non-numeric value."""


class ConfigInvariantError(ConfigError):
    """Structurally valid config whose values break a characterization invariant."""


class PatternError(ModelError, ValueError):
    """A bit pattern argument is not a string of '0'/'1' of admissible length."""


class DegenerateCoverage(ModelError, ValueError):
    """Covered length outside (0, nominal] passed to resistance rescaling."""


class DomainCountTooSmall(ModelError, ValueError):
    """Domain count below the operation's minimum."""


class DomainCountTooLarge(ModelError, ValueError):
    """Domain count above the operation's enumeration guard."""


class ClustersOverlap(ModelError):
    """Reference ladder requested for a report whose levels are not separable."""


class OracleMismatch(ModelError):
    """Production result disagrees with the independent reference path."""


class OffsetOutOfRange(ModelError, ValueError):
    """Misalignment offset beyond the admissible +/- notch length window."""


class EmptyNetwork(ModelError, ValueError):
    """Parallel combination of zero branches requested."""
