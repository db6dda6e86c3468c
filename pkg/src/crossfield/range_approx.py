"""Element-to-scatterer distance under spherical and far-field approximations."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError
from .geometry import ArrayGeometry, ArrayKind, ScattererSpherical, element_positions

PHASE_LIMIT = np.pi / 8.0


class RangeKind(str, enum.Enum):
    EXACT = "exact"
    TAYLOR1 = "taylor1"
    TAYLOR2 = "taylor2"
    SUBARRAY = "subarray"


@dataclass(frozen=True)
class RangeMethod:
    """Distance approximation selector; ``k_m``/``k_n`` only apply to sub-arrays."""

    kind: RangeKind
    k_m: int = 1
    k_n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", RangeKind(self.kind))
        if self.k_m < 1 or self.k_n < 1:
            raise ConfigError("subarray", "sub-array counts must be positive")

    @classmethod
    def subarray(cls, k_m: int, k_n: int) -> "RangeMethod":
        return cls(RangeKind.SUBARRAY, int(k_m), int(k_n))

    def label(self) -> str:
        if self.kind is RangeKind.SUBARRAY:
            return f"subarray({self.k_m}x{self.k_n})"
        return self.kind.value


EXACT = RangeMethod(RangeKind.EXACT)
TAYLOR1 = RangeMethod(RangeKind.TAYLOR1)
TAYLOR2 = RangeMethod(RangeKind.TAYLOR2)


def _exact(pos: np.ndarray, point: np.ndarray) -> np.ndarray:
    return np.linalg.norm(point - pos, axis=-1)


def _taylor1(pos: np.ndarray, r: float, u: np.ndarray) -> np.ndarray:
    return r - pos @ u


def _taylor2(pos: np.ndarray, r: float, u: np.ndarray) -> np.ndarray:
    proj = pos @ u
    return r - proj + (np.einsum("ij,ij->i", pos, pos) - proj * proj) / (2.0 * r)


def subarray_labels(geom: ArrayGeometry, k_m: int, k_n: int) -> np.ndarray:
    """Sub-array index of every element (row-major blocks)."""
    if geom.kind is ArrayKind.UCA:
        raise ConfigError("subarray", "sub-array split is defined for ULA/UPA only")
    if geom.rows % k_m or geom.cols % k_n:
        raise ConfigError("subarray", f"K=({k_m},{k_n}) does not divide a {geom.rows}x{geom.cols} array")
    m = np.repeat(np.arange(geom.rows), geom.cols) // (geom.rows // k_m)
    n = np.tile(np.arange(geom.cols), geom.rows) // (geom.cols // k_n)
    return m * k_n + n


def _subarray(geom: ArrayGeometry, pos: np.ndarray, point: np.ndarray, k_m: int, k_n: int) -> np.ndarray:
    labels = subarray_labels(geom, k_m, k_n)
    out = np.empty(len(pos))
    for k in range(k_m * k_n):
        sel = labels == k
        centre = pos[sel].mean(axis=0)
        rel = point - centre
        rk = float(np.linalg.norm(rel))
        out[sel] = rk - (pos[sel] - centre) @ (rel / rk)
    return out


def element_distances(geom: ArrayGeometry, scatterer: ScattererSpherical, method: RangeMethod = EXACT,
                      positions: np.ndarray | None = None) -> np.ndarray:
    """Distance from every element to the scatterer (local frame), shape (S,)."""
    pos = element_positions(geom) if positions is None else positions
    u = scatterer.unit
    kind = method.kind
    if kind is RangeKind.EXACT:
        return _exact(pos, scatterer.r * u)
    if kind is RangeKind.TAYLOR1:
        return _taylor1(pos, scatterer.r, u)
    if kind is RangeKind.TAYLOR2:
        return _taylor2(pos, scatterer.r, u)
    return _subarray(geom, pos, scatterer.r * u, method.k_m, method.k_n)


def _one(geom, s, scatterer, method):
    if not 0 <= s < geom.num_elements:
        raise IndexError(f"element index {s} out of range")
    pos = element_positions(geom)
    if method.kind is RangeKind.SUBARRAY:
        return float(element_distances(geom, scatterer, method, pos)[s])
    return float(element_distances(geom, scatterer, method, pos[s:s + 1])[0])


def exact_distance(geom: ArrayGeometry, s: int, scatterer: ScattererSpherical) -> float:
    return _one(geom, s, scatterer, EXACT)


def taylor1_distance(geom: ArrayGeometry, s: int, scatterer: ScattererSpherical) -> float:
    return _one(geom, s, scatterer, TAYLOR1)


def taylor2_distance(geom: ArrayGeometry, s: int, scatterer: ScattererSpherical) -> float:
    return _one(geom, s, scatterer, TAYLOR2)


def subarray_distance(geom: ArrayGeometry, s: int, scatterer: ScattererSpherical, k_m: int, k_n: int) -> float:
    return _one(geom, s, scatterer, RangeMethod.subarray(k_m, k_n))


@dataclass(frozen=True)
class PhaseErrorProfile:
    errors: np.ndarray
    wavelength: float
    method: RangeMethod
    crossing: int | None = None

    @property
    def max_error(self) -> float:
        return float(self.errors.max()) if self.errors.size else 0.0


def phase_errors(geom: ArrayGeometry, scatterer: ScattererSpherical, wavelength: float,
                 method: RangeMethod) -> np.ndarray:
    """Per-element |approx - exact| converted to radians."""
    if not wavelength > 0:
        raise ConfigError("wavelength", "wavelength must be positive")
    if method.kind is RangeKind.EXACT:
        return np.zeros(geom.num_elements)
    pos = element_positions(geom)
    approx = element_distances(geom, scatterer, method, pos)
    exact = element_distances(geom, scatterer, EXACT, pos)
    return 2.0 * np.pi / wavelength * np.abs(approx - exact)


_KERNEL_CODE = {RangeKind.TAYLOR1: 1, RangeKind.TAYLOR2: 2, RangeKind.SUBARRAY: 3}


def threshold_crossing(spacing: float, scatterer: ScattererSpherical, wavelength: float, method: RangeMethod,
                       threshold: float = PHASE_LIMIT, max_elements: int = 8192) -> int | None:
    """Smallest ULA size whose max phase error exceeds ``threshold``.

    The ULA grows symmetrically about its center along the local y axis.
    For sub-arrays the size grows in multiples of ``k_n`` so every
    sub-array keeps an equal share. Returns None if no crossing occurs.
    """
    if method.kind is RangeKind.EXACT:
        return None
    u = scatterer.unit
    n = kernels.ula_crossing(float(spacing), float(u[0]), float(u[1]), float(u[2]), float(scatterer.r),
                             float(wavelength), _KERNEL_CODE[method.kind], int(method.k_n),
                             float(threshold), int(max_elements))
    return None if n < 0 else int(n)


def phase_error_profile(geom: ArrayGeometry, scatterer: ScattererSpherical, wavelength: float,
                        method: RangeMethod) -> PhaseErrorProfile:
    errors = phase_errors(geom, scatterer, wavelength, method)
    crossing = None
    if geom.kind is ArrayKind.ULA and method.kind is not RangeKind.EXACT:
        crossing = threshold_crossing(geom.spacing, scatterer, wavelength, method)
    return PhaseErrorProfile(errors, wavelength, method, crossing)
