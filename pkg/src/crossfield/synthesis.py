"""Per-element parameter realisation and channel coefficient assembly."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .cluster_gen import ClusterSet, ScenarioConfig, XfGainConfig
from .errors import ConsistencyError, DomainError
from .geometry import ArrayGeometry, cartesian_to_spherical, element_positions, unit_vector
from .nf_boundary import AngleFrame, AntennaSpec, NfFfReport, Region, classify, field_pattern
from .range_approx import EXACT, TAYLOR1, TAYLOR2, element_distances
from .twin_scatterer import Layout, TwinScatterer, relative_position


class Mode(str, enum.Enum):
    CASCADE = "cascade"
    FORCE_FF = "force_ff"
    FORCE_EXACT = "force_exact"


class ElementMethod(str, enum.Enum):
    CENTER_COPY = "center_copy"
    TAYLOR1 = "taylor1"
    TAYLOR2 = "taylor2"
    EXACT = "exact"


@dataclass(frozen=True)
class PerElementParams:
    """Per-element distance and direction towards one scatterer.

    ``zenith``/``azimuth`` are expressed in the classification frame;
    ``directions`` are the same directions as global unit vectors.
    """

    distances: np.ndarray
    zenith: np.ndarray
    azimuth: np.ndarray
    directions: np.ndarray
    delay_method: ElementMethod
    zenith_method: ElementMethod
    azimuth_method: ElementMethod
    report: NfFfReport


def per_element_delays(geom: ArrayGeometry, scatterer, report: NfFfReport, mode: Mode = Mode.CASCADE):
    """Element distances chosen by the Taylor1 / Taylor2 / exact cascade."""
    mode = Mode(mode)
    if mode is Mode.FORCE_FF:
        method = ElementMethod.TAYLOR1
    elif mode is Mode.FORCE_EXACT:
        method = ElementMethod.EXACT
    elif report.delay_t1 is Region.FF:
        method = ElementMethod.TAYLOR1
    elif report.delay_t2 is Region.FF:
        method = ElementMethod.TAYLOR2
    else:
        method = ElementMethod.EXACT
    rm = {ElementMethod.TAYLOR1: TAYLOR1, ElementMethod.TAYLOR2: TAYLOR2, ElementMethod.EXACT: EXACT}[method]
    return element_distances(geom, scatterer, rm), method


def _frame_rotation(geom: ArrayGeometry, frame: AngleFrame) -> np.ndarray:
    return geom.orientation if AngleFrame(frame) is AngleFrame.GLOBAL else np.eye(3)


def per_element_angles(geom: ArrayGeometry, scatterer, report: NfFfReport, mode: Mode = Mode.CASCADE,
                       frame: AngleFrame = AngleFrame.LOCAL):
    """Per-element (zenith, azimuth, global directions, zenith method, azimuth method).

    A far-field flag copies the center angle to every element; a near-field
    flag computes the exact angle from each element to the scatterer.
    """
    mode = Mode(mode)
    rot = _frame_rotation(geom, frame)
    pos = element_positions(geom) @ rot.T
    point = scatterer.cartesian() @ rot.T
    delta = point - pos
    scale = max(1.0, float(np.linalg.norm(point)))
    if np.any(np.linalg.norm(delta, axis=1) <= 1e-12 * scale):
        raise DomainError("an element coincides with the scatterer")
    _, zc, ac = cartesian_to_spherical(point)
    if mode is Mode.FORCE_FF:
        zfar, afar = True, True
    elif mode is Mode.FORCE_EXACT:
        zfar, afar = False, False
    else:
        zfar, afar = report.zenith is Region.FF, report.azimuth is Region.FF
    s = len(pos)
    zen = np.full(s, zc) if zfar else np.arctan2(np.hypot(delta[:, 0], delta[:, 1]), delta[:, 2])
    azi = np.full(s, ac) if afar else np.arctan2(delta[:, 1], delta[:, 0])
    dirs = unit_vector(zen, azi)
    if AngleFrame(frame) is AngleFrame.LOCAL:
        dirs = geom.vector_to_global(dirs)
    zm = ElementMethod.CENTER_COPY if zfar else ElementMethod.EXACT
    am = ElementMethod.CENTER_COPY if afar else ElementMethod.EXACT
    return zen, azi, dirs, zm, am


def element_params(geom: ArrayGeometry, point, antenna: AntennaSpec, wavelength: float, mode: Mode = Mode.CASCADE,
                   frame: AngleFrame = AngleFrame.LOCAL, general: bool = False) -> PerElementParams:
    """Classify a global scatterer point and realise its per-element parameters."""
    sc = relative_position(point, geom)
    report = classify(geom, sc, antenna, wavelength, general=general, frame=frame)
    dist, dm = per_element_delays(geom, sc, report, mode)
    zen, azi, dirs, zm, am = per_element_angles(geom, sc, report, mode, frame)
    return PerElementParams(dist, zen, azi, dirs, dm, zm, am, report)


def xf_gain_factor(cfg: XfGainConfig, dx, dy, wavelength: float, d0):
    """Cross-field LoS gain factor K = 1 + C1^(((dx/C3)^2 + (dy/C4)^2)/lambda - C2*d0)."""
    if not cfg.enabled:
        return np.ones_like(np.asarray(dx, dtype=float)) if np.ndim(dx) else 1.0
    expo = ((np.asarray(dx) / cfg.c3) ** 2 + (np.asarray(dy) / cfg.c4) ** 2) / wavelength - cfg.c2 * np.asarray(d0)
    return 1.0 + cfg.c1 ** expo


def xf_geometry(geom: ArrayGeometry, source) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(dx, dy, d0) of every element for a source point, per the element-plane construction.

    Each element gets the plane through it orthogonal to the incident
    direction at the array center; d0 is the source-to-plane distance and
    (dx, dy) the element offset from the source projection in that plane.
    """
    pos = geom.global_positions()
    inc = np.asarray(source, float) - geom.center
    inc = inc / np.linalg.norm(inc)
    ax = geom.vector_to_global(np.array([1.0, 0.0, 0.0]))
    ax = ax - (ax @ inc) * inc
    if np.linalg.norm(ax) < 1e-12:
        ax = geom.vector_to_global(np.array([0.0, 1.0, 0.0]))
        ax = ax - (ax @ inc) * inc
    ax = ax / np.linalg.norm(ax)
    ay = np.cross(inc, ax)
    d0 = (np.asarray(source, float) - pos) @ inc
    foot = np.asarray(source, float) - d0[:, None] * inc
    off = pos - foot
    return off @ ax, off @ ay, d0


@dataclass(frozen=True)
class ChannelRealization:
    """Element-to-element coefficients; scattered rays have shape (U, S, N-1, M)."""

    coefficients: np.ndarray
    delays: np.ndarray
    tau_t: np.ndarray
    tau_v: np.ndarray
    tau_r: np.ndarray
    los_coefficients: np.ndarray
    los_delays: np.ndarray
    aod: np.ndarray
    zod: np.ndarray
    aoa: np.ndarray
    zoa: np.ndarray
    tx_params: list
    rx_params: list
    mode: Mode
    carrier_frequency: float
    metadata: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.coefficients.shape


def _doppler(dirs: np.ndarray, velocity: np.ndarray, t: float, wavelength: float) -> np.ndarray:
    return np.exp(1j * 2.0 * np.pi * t / wavelength * (dirs @ velocity))


def _ray_dirs(dirs: np.ndarray, zoff: np.ndarray, aoff: np.ndarray) -> np.ndarray:
    _, z, a = cartesian_to_spherical(dirs)
    zr = z[:, None] + zoff[None, :]
    zr = np.mod(zr, 2.0 * np.pi)
    flip = zr > np.pi
    zr = np.where(flip, 2.0 * np.pi - zr, zr)
    ar = a[:, None] + aoff[None, :] + np.where(flip, np.pi, 0.0)
    return unit_vector(zr, ar)


def assemble(cfg: ScenarioConfig, clusters: ClusterSet, twins: list[TwinScatterer], tx_params: list,
             rx_params: list, tx_geom: ArrayGeometry, rx_geom: ArrayGeometry, tx_ant: AntennaSpec,
             rx_ant: AntennaSpec, los: tuple, t: float = 0.0, mode: Mode = Mode.CASCADE) -> ChannelRealization:
    """Combine per-element parameters into LoS and scattered-ray coefficients.

    ``tx_params``/``rx_params`` hold one PerElementParams per twin, in twin
    order. ``los`` is (tx-side params towards the Rx center, rx-side params
    towards the Tx center).
    """
    c = cfg.speed_of_light
    lam = cfg.wavelength
    vel = np.asarray(cfg.rx_velocity, dtype=float)
    s_n, u_n = tx_geom.num_elements, rx_geom.num_elements
    m = clusters.num_rays
    n_sc = len(twins)
    if len(tx_params) != n_sc or len(rx_params) != n_sc or n_sc != clusters.num_clusters - 1:
        raise ConsistencyError("per-element parameter lists do not match the twin list")

    coeff = np.zeros((u_n, s_n, n_sc, m), dtype=complex)
    tau_t = np.zeros((s_n, n_sc, m))
    tau_r = np.zeros((u_n, n_sc, m))
    tau_v = np.zeros(n_sc)
    shape_t, shape_r = (s_n, n_sc, m), (u_n, n_sc, m)
    aod, zod = np.zeros(shape_t), np.zeros(shape_t)
    aoa, zoa = np.zeros(shape_r), np.zeros(shape_r)
    rot_t, rot_r = tx_geom.orientation, rx_geom.orientation
    for k, (tw, pt, pr) in enumerate(zip(twins, tx_params, rx_params)):
        n = tw.cluster
        if pt.distances.shape != (s_n,) or pr.distances.shape != (u_n,):
            raise ConsistencyError(f"element count mismatch for cluster {n}")
        half = 0.5 * clusters.ray_delay_offset[n]
        tau_t[:, k, :] = pt.distances[:, None] / c + half[None, :]
        tau_r[:, k, :] = pr.distances[:, None] / c + half[None, :]
        tau_v[k] = tw.r_v / c
        dt = _ray_dirs(pt.directions, clusters.ray_zod_offset[n], clusters.ray_aod_offset[n])
        dr = _ray_dirs(pr.directions, clusters.ray_zoa_offset[n], clusters.ray_aoa_offset[n])
        _, zod[:, k], aod[:, k] = cartesian_to_spherical(dt)
        _, zoa[:, k], aoa[:, k] = cartesian_to_spherical(dr)
        ft = field_pattern(tx_ant, dt @ rot_t)
        fr = field_pattern(rx_ant, dr @ rot_r)
        psi = clusters.phases[n]
        xi = 1.0 / np.sqrt(clusters.xpr[n])
        pol = np.empty((m, 2, 2), dtype=complex)
        pol[:, 0, 0] = np.exp(1j * psi[:, 0])
        pol[:, 0, 1] = xi * np.exp(1j * psi[:, 1])
        pol[:, 1, 0] = xi * np.exp(1j * psi[:, 2])
        pol[:, 1, 1] = np.exp(1j * psi[:, 3])
        amp = math.sqrt(clusters.powers[n] / m)
        h = np.einsum("uma,mab,smb->usm", fr, pol, ft)
        coeff[:, :, k, :] = amp * h * _doppler(dr, vel, t, lam)[:, None, :]
    delays = tau_t[None, :, :, :] + tau_v[None, None, :, None] + tau_r[:, None, :, :]

    los_t, los_r = los
    if mode is Mode.FORCE_EXACT:
        pu, ps = rx_geom.global_positions(), tx_geom.global_positions()
        los_dist = np.linalg.norm(pu[:, None, :] - ps[None, :, :], axis=-1)
    else:
        los_dist = los_r.distances[:, None] + los_t.distances[None, :] - clusters.los_distance
    los_delays = los_dist / c
    ft = field_pattern(tx_ant, los_t.directions @ rot_t)
    fr = field_pattern(rx_ant, los_r.directions @ rot_r)
    h_los = fr[:, None, 0] * ft[None, :, 0] - fr[:, None, 1] * ft[None, :, 1]
    h_los = math.sqrt(clusters.powers[0]) * h_los * _doppler(los_r.directions, vel, t, lam)[:, None]
    if cfg.xf_gain.enabled:
        # for the LoS factor d0 is the distance between the array centers
        dx_t, dy_t, _ = xf_geometry(tx_geom, rx_geom.center)
        dx_r, dy_r, _ = xf_geometry(rx_geom, tx_geom.center)
        kt = xf_gain_factor(cfg.xf_gain, dx_t, dy_t, lam, clusters.los_distance)
        kr = xf_gain_factor(cfg.xf_gain, dx_r, dy_r, lam, clusters.los_distance)
        h_los = h_los / (kr[:, None] * kt[None, :])

    out = ChannelRealization(coeff, delays, tau_t, tau_v, tau_r, h_los, los_delays, aod, zod, aoa, zoa,
                             list(tx_params), list(rx_params), Mode(mode), cfg.carrier_frequency)
    if not (np.all(np.isfinite(coeff)) and np.all(np.isfinite(h_los))):
        raise ConsistencyError("non-finite channel coefficients")
    return out


def frequency_response(real: ChannelRealization, freqs) -> np.ndarray:
    """Channel frequency response H[f, u, s] summed over LoS and all rays."""
    f = np.asarray(freqs, dtype=float)
    if f.size == 0:
        raise ValueError("frequency grid is empty")
    if np.any(np.diff(f) < 0):
        raise ValueError("frequency grid must be sorted")
    u_n, s_n = real.los_coefficients.shape
    out = np.empty((f.size, u_n, s_n), dtype=complex)
    h = real.coefficients.reshape(u_n, s_n, -1)
    tau = real.delays.reshape(u_n, s_n, -1)
    for i, fi in enumerate(f):
        out[i] = (real.los_coefficients * np.exp(-2j * np.pi * fi * real.los_delays)
                  + np.sum(h * np.exp(-2j * np.pi * fi * tau), axis=-1))
    return out
