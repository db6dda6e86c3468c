"""Near-/far-field boundaries per channel parameter and scatterer classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .geometry import ArrayGeometry, ArrayKind, ScattererSpherical, aperture, element_positions, wrap_angle

FRESNEL_CONSTANT = 0.62


class Region(str, enum.Enum):
    NF = "NF"
    FF = "FF"

    @classmethod
    def of(cls, far: bool) -> "Region":
        return cls.FF if far else cls.NF


class PatternKind(str, enum.Enum):
    ISOTROPIC = "isotropic"
    COSINE_POWER = "cosine_power"
    TABULATED_CUT = "tabulated_cut"


class AngleFrame(str, enum.Enum):
    """Axes used for angle classification.

    ``local`` measures angles in the array frame. ``global`` measures the
    elevation from the global horizontal plane and the azimuth in the global
    horizontal plane, using the horizontal footprint of the array vertices.
    """

    LOCAL = "local"
    GLOBAL = "global"


@dataclass(frozen=True)
class AntennaSpec:
    """Element pattern. Beamwidths in radians, gain in dBi.

    The boresight is the local z axis. HPBW_H applies to the cut containing
    the local x axis and HPBW_V to the cut containing the local y axis.
    Tabulated cuts hold (angle_rad, gain_dB) pairs relative to boresight.
    """

    gain_dbi: float = 0.0
    hpbw_v: float = 2.0 * math.pi
    hpbw_h: float = 2.0 * math.pi
    pattern: PatternKind = PatternKind.ISOTROPIC
    floor_db: float = -30.0
    slant: float = 0.0
    cut_v: tuple = field(default=())
    cut_h: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "pattern", PatternKind(self.pattern))
        for key in ("hpbw_v", "hpbw_h"):
            val = getattr(self, key)
            if not 0.0 < val <= 2.0 * math.pi:
                raise ConfigError(key, "beamwidth must lie in (0, 2*pi]")
        if self.pattern is PatternKind.TABULATED_CUT and (len(self.cut_v) < 2 or len(self.cut_h) < 2):
            raise ConfigError("pattern", "tabulated pattern needs cut_v and cut_h with at least two points")

    @classmethod
    def isotropic(cls) -> "AntennaSpec":
        return cls()

    @classmethod
    def cosine(cls, hpbw_deg: float = 120.0, gain_dbi: float = 0.0) -> "AntennaSpec":
        h = math.radians(hpbw_deg)
        return cls(gain_dbi, h, h, PatternKind.COSINE_POWER)


def _cos_exponent(hpbw: float) -> float:
    half = hpbw / 2.0
    if half >= math.pi / 2.0:
        return 0.0
    return math.log(0.5) / math.log(math.cos(half))


def power_pattern(antenna: AntennaSpec, u_local: np.ndarray) -> np.ndarray:
    """Linear power gain for local unit vectors of shape (..., 3)."""
    u = np.asarray(u_local, dtype=float)
    g0 = 10.0 ** (antenna.gain_dbi / 10.0)
    if antenna.pattern is PatternKind.ISOTROPIC:
        return np.full(u.shape[:-1], g0)
    a_h = np.arctan2(u[..., 0], u[..., 2])
    a_v = np.arctan2(u[..., 1], u[..., 2])
    floor = 10.0 ** (antenna.floor_db / 10.0)
    if antenna.pattern is PatternKind.COSINE_POWER:
        ch = np.clip(np.cos(a_h), 0.0, None) ** _cos_exponent(antenna.hpbw_h)
        cv = np.clip(np.cos(a_v), 0.0, None) ** _cos_exponent(antenna.hpbw_v)
        front = (np.abs(a_h) < math.pi / 2) & (np.abs(a_v) < math.pi / 2)
        gain = np.where(front, ch * cv, 0.0)
        return g0 * np.maximum(gain, floor)
    cv = np.asarray(antenna.cut_v, dtype=float)
    ch = np.asarray(antenna.cut_h, dtype=float)
    db = np.interp(a_v, cv[:, 0], cv[:, 1]) + np.interp(a_h, ch[:, 0], ch[:, 1])
    return g0 * np.maximum(10.0 ** (db / 10.0), floor)


def field_pattern(antenna: AntennaSpec, u_local: np.ndarray) -> np.ndarray:
    """Field components (F_theta, F_phi), shape (..., 2)."""
    amp = np.sqrt(power_pattern(antenna, u_local))
    return np.stack([amp * math.cos(antenna.slant), amp * math.sin(antenna.slant)], axis=-1)


# delay boundaries ---------------------------------------------------------

def rayleigh_worst(D: float, wavelength: float) -> float:
    return 2.0 * D * D / wavelength


def fresnel_worst(D: float, wavelength: float) -> float:
    return FRESNEL_CONSTANT * math.sqrt(D ** 3 / wavelength)


def subarray_aperture(geom: ArrayGeometry, k_m: int = 1, k_n: int = 1) -> float:
    """Aperture of one sub-array when a ULA/UPA is split k_m x k_n ways."""
    if geom.kind is ArrayKind.UCA:
        raise ConfigError("kind", "sub-array partition is defined for ULA and UPA only")
    if geom.rows % k_m or geom.cols % k_n:
        raise ConfigError("subarrays", f"{geom.rows}x{geom.cols} is not divisible into {k_m}x{k_n} sub-arrays")
    return geom.spacing * math.hypot(geom.rows // k_m - 1, geom.cols // k_n - 1)


def subarray_rayleigh(geom: ArrayGeometry, wavelength: float, k_m: int = 1, k_n: int = 1) -> float:
    """Rayleigh distance of one sub-array; the first-order bound per sub-array center."""
    return rayleigh_worst(subarray_aperture(geom, k_m, k_n), wavelength)


def rayleigh_general(D: float, wavelength: float, theta: float) -> float:
    return 2.0 * D * D * math.cos(theta) ** 2 / wavelength


def fresnel_general(D: float, wavelength: float, theta: float, phi: float) -> float:
    a = math.sin(theta) * math.sin(phi)
    radicand = D ** 3 / wavelength * (a - a ** 3)
    return math.sqrt(radicand) if radicand > 0.0 else 0.0


# angle boundaries ---------------------------------------------------------

def mad_zenith(r: float, D: float, theta_p: float) -> float:
    """Maximum zenith difference across an aperture D seen at (r, theta')."""
    k = r / D
    return theta_p - math.atan2(k * math.sin(theta_p) - 0.5, k * math.cos(theta_p))


def zenith_boundary(D: float, theta_p: float, hpbw_v: float) -> float:
    """Distance beyond which the zenith MAD stays under HPBW_V/2.

    The denominator equals sin(h)/cos(theta' - h). It is non-positive only
    when h >= theta' + pi/2, and the MAD never exceeds theta' + pi/2, so
    that case is far field at every distance and the boundary is 0.
    """
    h = hpbw_v / 2.0
    if D == 0.0:
        return 0.0
    if math.cos(theta_p - h) <= 0.0:
        return 0.0
    den = math.sin(theta_p) - math.tan(theta_p - h) * math.cos(theta_p)
    if not den > 0.0:
        return 0.0
    return D / (2.0 * den)


def _mad_from_vertices(p_xy: np.ndarray, vertices_xy: np.ndarray) -> float:
    rho = math.hypot(p_xy[0], p_xy[1])
    if rho == 0.0:
        return math.inf
    phi = math.atan2(p_xy[1], p_xy[0])
    seen = np.arctan2(p_xy[1] - vertices_xy[:, 1], p_xy[0] - vertices_xy[:, 0])
    return float(np.max(np.abs(wrap_angle(phi - seen))))


def corner_indices(geom: ArrayGeometry) -> np.ndarray:
    m, n = geom.rows, geom.cols
    return np.unique([0, n - 1, (m - 1) * n, m * n - 1])


def mad_azimuth(geom: ArrayGeometry, scatterer: ScattererSpherical) -> float:
    """Maximum azimuth difference across the array (local frame)."""
    if geom.kind is ArrayKind.UCA:
        rho = scatterer.r * math.sin(scatterer.theta)
        if rho <= geom.radius:
            return math.inf
        return math.asin(geom.radius / rho)
    verts = element_positions(geom)[corner_indices(geom)]
    return _mad_from_vertices(scatterer.cartesian()[:2], verts[:, :2])


def mad_azimuth_global(geom: ArrayGeometry, scatterer: ScattererSpherical) -> float:
    """Azimuth MAD in the global horizontal plane using projected vertices."""
    pos = element_positions(geom)
    idx = np.arange(len(pos)) if geom.kind is ArrayKind.UCA else corner_indices(geom)
    verts = geom.vector_to_global(pos[idx])
    p = geom.vector_to_global(scatterer.cartesian())
    return _mad_from_vertices(p[:2], verts[:, :2])


def theta_prime(geom: ArrayGeometry, scatterer: ScattererSpherical, frame: AngleFrame = AngleFrame.LOCAL) -> float:
    u = scatterer.unit
    if AngleFrame(frame) is AngleFrame.GLOBAL:
        comp = geom.vector_to_global(u)[2]
    else:
        comp = u[1] if geom.kind is ArrayKind.ULA else u[2]
    return math.asin(min(1.0, max(-1.0, float(comp))))


@dataclass(frozen=True)
class NfFfReport:
    delay_t1: Region
    delay_t2: Region
    zenith: Region
    azimuth: Region
    r: float
    aperture: float
    rayleigh: float
    fresnel: float
    zenith_boundary: float
    azimuth_mad: float
    theta_prime: float

    def as_dict(self) -> dict:
        return {k: (v.value if isinstance(v, Region) else v) for k, v in self.__dict__.items()}


def classify(geom: ArrayGeometry, scatterer: ScattererSpherical, antenna: AntennaSpec, wavelength: float,
             general: bool = False, frame: AngleFrame = AngleFrame.LOCAL) -> NfFfReport:
    """Compare the scatterer distance and angles against every boundary.

    With ``general`` the delay boundaries of a ULA use the actual direction
    cosine along the array axis. Planar and circular apertures contain
    element offsets orthogonal to any direction, so they always use the
    worst case.
    """
    D = aperture(geom)
    r = scatterer.r
    if general and geom.kind is ArrayKind.ULA:
        a = abs(scatterer.unit[1])
        ray = rayleigh_general(D, wavelength, math.asin(min(a, 1.0)))
        fre = fresnel_general(D, wavelength, math.pi / 2.0, math.asin(min(a, 1.0)))
    else:
        ray = rayleigh_worst(D, wavelength)
        fre = fresnel_worst(D, wavelength)
    t1 = r > ray
    # Taylor2 is at least as accurate as Taylor1, so a Taylor1 pass implies it
    t2 = t1 or r > fre
    frame = AngleFrame(frame)
    tp = theta_prime(geom, scatterer, frame)
    zb = zenith_boundary(D, tp, antenna.hpbw_v)
    mad = mad_azimuth_global(geom, scatterer) if frame is AngleFrame.GLOBAL else mad_azimuth(geom, scatterer)
    if D == 0.0:
        mad = 0.0
    return NfFfReport(
        delay_t1=Region.of(t1),
        delay_t2=Region.of(t2),
        zenith=Region.of(r > zb),
        azimuth=Region.of(mad < antenna.hpbw_h / 2.0),
        r=r, aperture=D, rayleigh=ray, fresnel=fre,
        zenith_boundary=zb, azimuth_mad=mad, theta_prime=tp,
    )
