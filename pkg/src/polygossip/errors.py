"""Exception types shared across the package."""


class PolygossipError(Exception):
    """Base class for all package-specific errors."""


class SpecificationError(PolygossipError, ValueError):
    """A graph or experiment specification violates its invariants."""


class GenerationError(PolygossipError, RuntimeError):
    """A random construction failed after exhausting its retry budget."""


class CapabilityError(PolygossipError, RuntimeError):
    """The request exceeds a configured capability (e.g. dense eigensolver size)."""


class EstimationError(PolygossipError, RuntimeError):
    """Too little usable data to produce the requested estimate."""


class FitError(PolygossipError, RuntimeError):
    """Rate fitting failed (empty window, non-positive errors, ...)."""
