"""Cross near-/far-field MIMO channel simulation for large antenna arrays."""

from .errors import ConfigError, ConsistencyError, CrossFieldError, DomainError
from .geometry import SPEED_OF_LIGHT, ArrayGeometry, ArrayKind, ScattererSpherical, aperture, element_positions
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry", "ArrayKind", "BACKEND", "ConfigError", "ConsistencyError", "CrossFieldError",
    "DomainError", "SPEED_OF_LIGHT", "ScattererSpherical", "aperture", "element_positions", "__version__",
]
