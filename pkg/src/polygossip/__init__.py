"""polygossip: simulate and verify polynomial-based gossip averaging on graphs."""

from . import bench, gossip, graphgen, orthopoly, spectral
from .errors import (
    CapabilityError,
    EstimationError,
    FitError,
    GenerationError,
    PolygossipError,
    SpecificationError,
)

__all__ = [
    "bench",
    "gossip",
    "graphgen",
    "orthopoly",
    "spectral",
    "PolygossipError",
    "SpecificationError",
    "GenerationError",
    "CapabilityError",
    "EstimationError",
    "FitError",
]

__version__ = "0.1.0"
