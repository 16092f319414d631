"""Exception types shared across the package."""


class CmapQKError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CmapQKError):
    """Point lies outside the admissible domain of a construction."""


class ArgumentError(CmapQKError, ValueError):
    """Structurally invalid argument (wrong shape, boundary value, bad order)."""


class SignatureError(CmapQKError):
    """A metric does not have the signature required at this point."""


class ConditioningError(CmapQKError):
    """A linear solve is too ill-conditioned to trust."""


class SingularHamiltonianError(CmapQKError):
    """The moment-map values f or f1 vanish (or nearly vanish) at the point."""


class NoiseFloorError(CmapQKError):
    """Finite-difference noise floor exceeds the requested tolerance."""


class QuadratureError(CmapQKError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


class ConfigError(CmapQKError):
    """Invalid run configuration (CLI/config-file input)."""
