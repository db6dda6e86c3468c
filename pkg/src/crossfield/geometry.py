"""Array geometry, coordinate conventions and direction vectors.

Arrays are described in a local frame where the elements lie in the local
xy-plane and the array normal is the local z axis. ``orientation`` rotates
local vectors into the global frame and ``center`` translates them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

SPEED_OF_LIGHT = 3.0e8


class ArrayKind(str, enum.Enum):
    ULA = "ULA"
    UPA = "UPA"
    UCA = "UCA"


def _as_rotation(mat) -> np.ndarray:
    r = np.asarray(mat, dtype=float).reshape(3, 3)
    if not np.allclose(r @ r.T, np.eye(3), atol=1e-9) or np.linalg.det(r) < 0:
        raise ConfigError("orientation", "orientation must be a proper rotation matrix")
    return r


def rotation_zyx(bearing: float = 0.0, downtilt: float = 0.0, slant: float = 0.0) -> np.ndarray:
    """Rotation Rz(bearing) @ Ry(downtilt) @ Rx(slant), angles in radians."""
    ca, sa = np.cos(bearing), np.sin(bearing)
    cb, sb = np.cos(downtilt), np.sin(downtilt)
    cg, sg = np.cos(slant), np.sin(slant)
    rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cg, -sg], [0.0, sg, cg]])
    return rz @ ry @ rx


# Local x -> global y, local y -> global z, normal (local z) -> global +x.
# A planar array standing upright in the global yz-plane and facing +x.
VERTICAL_YZ = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear, planar or circular array.

    For a ULA ``rows`` is 1 and elements run along the local y axis. For a
    UCA ``cols`` is the element count and ``radius`` the circle radius.
    """

    kind: ArrayKind
    rows: int = 1
    cols: int = 1
    spacing: float = 0.0
    radius: float = 0.0
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        try:
            kind = ArrayKind(self.kind)
        except ValueError:
            raise ConfigError("kind", f"unknown array kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if int(self.rows) != self.rows or self.rows < 1:
            raise ConfigError("rows", "rows must be a positive integer")
        if int(self.cols) != self.cols or self.cols < 1:
            raise ConfigError("cols", "cols must be a positive integer")
        object.__setattr__(self, "rows", int(self.rows))
        object.__setattr__(self, "cols", int(self.cols))
        if kind is ArrayKind.ULA and self.rows != 1:
            raise ConfigError("rows", "a ULA has exactly one row")
        if kind is ArrayKind.UCA:
            if self.rows != 1:
                raise ConfigError("rows", "a UCA has exactly one row")
            if not self.radius > 0:
                raise ConfigError("radius", "UCA radius must be positive")
        elif not self.spacing > 0:
            raise ConfigError("spacing", "element spacing must be positive")
        center = np.asarray(self.center, dtype=float).reshape(3)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "orientation", _as_rotation(self.orientation))

    @property
    def num_elements(self) -> int:
        return self.rows * self.cols

    def local_positions(self) -> np.ndarray:
        return element_positions(self)

    def global_positions(self) -> np.ndarray:
        return self.to_global(element_positions(self))

    def to_global(self, local: np.ndarray) -> np.ndarray:
        return np.asarray(local, dtype=float) @ self.orientation.T + self.center

    def to_local(self, point: np.ndarray) -> np.ndarray:
        return (np.asarray(point, dtype=float) - self.center) @ self.orientation

    def vector_to_local(self, vec: np.ndarray) -> np.ndarray:
        return np.asarray(vec, dtype=float) @ self.orientation

    def vector_to_global(self, vec: np.ndarray) -> np.ndarray:
        return np.asarray(vec, dtype=float) @ self.orientation.T

    def with_center(self, center) -> "ArrayGeometry":
        return ArrayGeometry(self.kind, self.rows, self.cols, self.spacing, self.radius,
                             np.asarray(center, dtype=float), self.orientation)


def ula(n: int, spacing: float, **kw) -> ArrayGeometry:
    return ArrayGeometry(ArrayKind.ULA, 1, n, spacing, **kw)


def upa(m: int, n: int, spacing: float, **kw) -> ArrayGeometry:
    return ArrayGeometry(ArrayKind.UPA, m, n, spacing, **kw)


def uca(n: int, radius: float, **kw) -> ArrayGeometry:
    return ArrayGeometry(ArrayKind.UCA, 1, n, radius=radius, **kw)


def element_positions(geom: ArrayGeometry) -> np.ndarray:
    """Local element positions, shape (S, 3), row-major s = m*N + n."""
    if geom.kind is ArrayKind.UCA:
        ang = 2.0 * np.pi * np.arange(geom.cols) / geom.cols
        pos = np.zeros((geom.cols, 3))
        pos[:, 0] = geom.radius * np.cos(ang)
        pos[:, 1] = geom.radius * np.sin(ang)
        # cos/sin of multiples of pi/2 leave ~1e-16 residue; snap for clean output
        pos[np.abs(pos) < 1e-15 * geom.radius] = 0.0
        return pos
    dm = np.arange(geom.rows) - (geom.rows - 1) / 2.0
    dn = np.arange(geom.cols) - (geom.cols - 1) / 2.0
    pos = np.zeros((geom.rows * geom.cols, 3))
    pos[:, 0] = np.repeat(dm, geom.cols) * geom.spacing
    pos[:, 1] = np.tile(dn, geom.rows) * geom.spacing
    return pos


def aperture(geom: ArrayGeometry) -> float:
    """Largest linear dimension D of the array."""
    if geom.num_elements == 1:
        return 0.0
    if geom.kind is ArrayKind.UCA:
        return 2.0 * geom.radius
    return geom.spacing * float(np.hypot(geom.rows - 1, geom.cols - 1))


@dataclass(frozen=True)
class ScattererSpherical:
    """Scatterer position (r, zenith, azimuth) relative to an array center."""

    r: float
    theta: float
    phi: float
    frame: str = ""

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("scatterer distance must be positive")
        if not 0.0 <= self.theta <= np.pi:
            raise DomainError(f"zenith {self.theta} outside [0, pi]")
        if not -np.pi < self.phi <= np.pi:
            raise DomainError(f"azimuth {self.phi} outside (-pi, pi]")

    @property
    def unit(self) -> np.ndarray:
        return direction_unit_vector(self)

    def cartesian(self) -> np.ndarray:
        return self.r * direction_unit_vector(self)

    @classmethod
    def from_cartesian(cls, vec, frame: str = "") -> "ScattererSpherical":
        r, theta, phi = cartesian_to_spherical(vec)
        return cls(float(r), float(theta), float(phi), frame)


def direction_unit_vector(s: ScattererSpherical) -> np.ndarray:
    return unit_vector(s.theta, s.phi)


def unit_vector(theta, phi) -> np.ndarray:
    """(sin t cos p, sin t sin p, cos t); broadcasts over array inputs."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def wrap_angle(phi):
    """Wrap to (-pi, pi]."""
    w = np.mod(np.asarray(phi, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    return float(w) if w.ndim == 0 else w


def cartesian_to_spherical(vec):
    """Return (r, zenith, azimuth) for vectors of shape (..., 3)."""
    v = np.asarray(vec, dtype=float)
    rho = np.hypot(v[..., 0], v[..., 1])
    r = np.hypot(rho, v[..., 2])
    theta = np.arctan2(rho, v[..., 2])
    phi = wrap_angle(np.arctan2(v[..., 1], v[..., 0]))
    return r, theta, phi


def elevation_wrt_array(geom: ArrayGeometry, target) -> float:
    """Signed angle theta' of a global target point seen from the array center.

    ULA: complement of the angle between the array axis and the target vector,
    so a target on the axis gives pi/2. UPA/UCA: 90 degrees minus the angle
    between the target vector and the array normal.
    """
    v = geom.to_local(target)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DomainError("target coincides with the array center")
    axis_component = v[1] if geom.kind is ArrayKind.ULA else v[2]
    return float(np.arcsin(np.clip(axis_component / norm, -1.0, 1.0)))
