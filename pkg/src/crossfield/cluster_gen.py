"""Seeded generation of cluster and ray parameters.

Large-scale parameters are taken directly from the configuration instead of
being drawn from correlated lognormal maps. Cluster 0 is the LoS cluster and
carries a single ray; clusters 1..N-1 are scattered clusters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .geometry import (SPEED_OF_LIGHT, VERTICAL_YZ, ArrayGeometry, ArrayKind, cartesian_to_spherical,
                       rotation_zyx, wrap_angle)
from .nf_boundary import AngleFrame, AntennaSpec, PatternKind

# Fixed ray offsets for 20 rays, unit rms spread (38.901 Table 7.5-3).
OFFSETS_20 = np.array([0.0447, 0.1413, 0.2492, 0.3715, 0.5129, 0.6797, 0.8844, 1.1481, 1.5195, 2.1551])


@dataclass(frozen=True)
class ArraySpec:
    """Array description used in configuration files."""

    kind: str = "UPA"
    rows: int = 1
    cols: int = 1
    spacing: float = 0.5
    radius: float = 0.0
    plane: str = "xy"
    bearing_deg: float = 0.0

    def __post_init__(self):
        if self.plane not in ("xy", "yz"):
            raise ConfigError("plane", f"plane must be 'xy' or 'yz', got {self.plane!r}")
        try:
            ArrayKind(self.kind)
        except ValueError:
            raise ConfigError("kind", f"unknown array kind {self.kind!r}") from None
        self.build(np.zeros(3))

    def build(self, center) -> ArrayGeometry:
        base = VERTICAL_YZ if self.plane == "yz" else np.eye(3)
        rot = rotation_zyx(math.radians(self.bearing_deg)) @ base
        kind = ArrayKind(self.kind)
        rows = 1 if kind is not ArrayKind.UPA else self.rows
        return ArrayGeometry(kind, rows, self.cols, self.spacing, self.radius, np.asarray(center, float), rot)


@dataclass(frozen=True)
class AntennaConfig:
    pattern: str = "cosine_power"
    gain_dbi: float = 0.0
    hpbw_v_deg: float = 120.0
    hpbw_h_deg: float = 120.0
    floor_db: float = -30.0
    slant_deg: float = 0.0
    cut_v: tuple = ()
    cut_h: tuple = ()

    def __post_init__(self):
        try:
            PatternKind(self.pattern)
        except ValueError:
            raise ConfigError("pattern", f"unknown pattern {self.pattern!r}") from None
        for key in ("hpbw_v_deg", "hpbw_h_deg"):
            if not 0.0 < getattr(self, key) <= 360.0:
                raise ConfigError(key, "must lie in (0, 360]")
        if self.pattern == PatternKind.TABULATED_CUT.value and not (self.cut_v and self.cut_h):
            raise ConfigError("cut_v", "tabulated pattern needs both cut_v and cut_h")

    def spec(self) -> AntennaSpec:
        def cut(rows):
            return tuple((math.radians(a), g) for a, g in rows)
        return AntennaSpec(self.gain_dbi, math.radians(self.hpbw_v_deg), math.radians(self.hpbw_h_deg),
                           PatternKind(self.pattern), self.floor_db, math.radians(self.slant_deg),
                           cut(self.cut_v), cut(self.cut_h))


@dataclass(frozen=True)
class XfGainConfig:
    """Constants of the cross-field LoS gain factor; disabled means K = 1."""

    enabled: bool = False
    d_ref: float = 1.0
    c1: float = 10.0
    c2: float = 1.0
    c3: float = 1.0
    c4: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Scenario parameters. Angles are configured in degrees (``*_deg``)."""

    carrier_frequency: float = 2.6e9
    num_clusters: int = 16
    rays_per_cluster: int = 20
    k_factor_db: float = 9.0
    delay_spread: float = 100e-9
    delay_scaling: float = 2.5
    asd_deg: float = 12.8
    asa_deg: float = 64.6
    zsd_deg: float = 5.0
    zsa_deg: float = 8.9
    cluster_shadowing_db: float = 3.0
    cluster_delay_spread: float = 5e-9
    cluster_asd_deg: float = 5.0
    cluster_asa_deg: float = 11.0
    cluster_zsd_deg: float = 1.9
    cluster_zsa_deg: float = 7.0
    xpr_mean_db: float = 8.0
    xpr_std_db: float = 4.0
    tx_height: float = 25.0
    rx_height: float = 2.5
    d2d: float = 100.0
    tx_center: tuple | None = None
    rx_center: tuple | None = None
    rx_velocity: tuple = (0.0, 0.0, 0.0)
    time: float = 0.0
    seed: int = 0
    speed_of_light: float = SPEED_OF_LIGHT
    one_bounce_probability: float = 0.0
    split_min: float = 0.2
    split_max: float = 0.8
    split_reference: str = "ellipse"
    general_angles: bool = False
    angle_frame: str = "local"
    tx_array: ArraySpec = field(default_factory=lambda: ArraySpec("UPA", 4, 4, 3.0, plane="yz"))
    rx_array: ArraySpec = field(default_factory=lambda: ArraySpec("ULA", 1, 1, 0.5))
    tx_antenna: AntennaConfig = field(default_factory=AntennaConfig)
    rx_antenna: AntennaConfig = field(default_factory=lambda: AntennaConfig(pattern="isotropic"))
    xf_gain: XfGainConfig = field(default_factory=XfGainConfig)

    def __post_init__(self):
        self.validate()

    def validate(self):
        positive = ("carrier_frequency", "speed_of_light")
        for key in positive:
            if not getattr(self, key) > 0:
                raise ConfigError(key, "must be positive")
        for key in ("num_clusters", "rays_per_cluster"):
            val = getattr(self, key)
            if isinstance(val, bool) or int(val) != val or val < 1:
                raise ConfigError(key, "must be an integer >= 1")
        if not self.delay_scaling > 1:
            raise ConfigError("delay_scaling", "must exceed 1")
        for f in fields(self):
            if f.name.endswith("_deg") or f.name in ("delay_spread", "cluster_delay_spread",
                                                     "cluster_shadowing_db", "xpr_std_db"):
                if getattr(self, f.name) < 0:
                    raise ConfigError(f.name, "spreads must be >= 0")
        if self.d2d < 0:
            raise ConfigError("d2d", "must be >= 0")
        if not 0.0 <= self.one_bounce_probability <= 1.0:
            raise ConfigError("one_bounce_probability", "must lie in [0, 1]")
        if not 0.0 < self.split_min <= self.split_max < 1.0:
            raise ConfigError("split_min", "need 0 < split_min <= split_max < 1")
        if self.split_reference not in ("excess", "ellipse"):
            raise ConfigError("split_reference", "must be 'excess' or 'ellipse'")
        try:
            AngleFrame(self.angle_frame)
        except ValueError:
            raise ConfigError("angle_frame", f"unknown frame {self.angle_frame!r}") from None
        for key in ("tx_center", "rx_center", "rx_velocity"):
            val = getattr(self, key)
            if val is not None and len(val) != 3:
                raise ConfigError(key, "must be a 3-vector")
        if np.allclose(self.tx_position(), self.rx_position()):
            raise ConfigError("rx_center", "Tx and Rx centers coincide")

    @property
    def wavelength(self) -> float:
        return self.speed_of_light / self.carrier_frequency

    @property
    def k_factor(self) -> float:
        return 10.0 ** (self.k_factor_db / 10.0)

    def tx_position(self) -> np.ndarray:
        if self.tx_center is not None:
            return np.asarray(self.tx_center, dtype=float)
        return np.array([0.0, 0.0, self.tx_height])

    def rx_position(self) -> np.ndarray:
        if self.rx_center is not None:
            return np.asarray(self.rx_center, dtype=float)
        return np.array([self.d2d, 0.0, self.rx_height])

    def tx_geometry(self) -> ArrayGeometry:
        return self.tx_array.build(self.tx_position())

    def rx_geometry(self) -> ArrayGeometry:
        return self.rx_array.build(self.rx_position())


@dataclass(frozen=True)
class ClusterSet:
    """Cluster and ray parameters, GCS angles in radians.

    Index 0 is the LoS cluster. ``powers`` are fractions of the total power
    (sum 1) and already include the Ricean split. Ray arrays have shape
    (N, M); ray angle offsets are added to the cluster angles.
    """

    delays: np.ndarray
    powers: np.ndarray
    aod: np.ndarray
    zod: np.ndarray
    aoa: np.ndarray
    zoa: np.ndarray
    k_factor: float
    los_distance: float
    ray_aod_offset: np.ndarray
    ray_zod_offset: np.ndarray
    ray_aoa_offset: np.ndarray
    ray_zoa_offset: np.ndarray
    ray_delay_offset: np.ndarray
    phases: np.ndarray
    xpr: np.ndarray

    @property
    def num_clusters(self) -> int:
        return len(self.delays)

    @property
    def num_rays(self) -> int:
        return self.ray_aod_offset.shape[1]


def _fold_zenith(theta: np.ndarray) -> np.ndarray:
    t = np.mod(theta, 2.0 * np.pi)
    return np.where(t > np.pi, 2.0 * np.pi - t, t)


def los_angles(cfg: ScenarioConfig):
    """(zod, aod, zoa, aoa, distance) of the Tx-Rx line of sight."""
    v = cfg.rx_position() - cfg.tx_position()
    d, zod, aod = cartesian_to_spherical(v)
    _, zoa, aoa = cartesian_to_spherical(-v)
    return float(zod), float(aod), float(zoa), float(aoa), float(d)


def ray_offset_table(m: int) -> np.ndarray:
    """Symmetric offsets: the 20-ray table (unit rms) or mid-point quantiles of a unit-rms Laplacian."""
    if m == 1:
        return np.zeros(1)
    if m == 20:
        return np.concatenate([OFFSETS_20, -OFFSETS_20])
    q = (np.arange(1, m + 1) - 0.5) / m
    b = 1.0 / math.sqrt(2.0)
    off = -b * np.sign(q - 0.5) * np.log(1.0 - 2.0 * np.abs(q - 0.5))
    return off - off.mean()


def generate_clusters(cfg: ScenarioConfig, rng: np.random.Generator) -> ClusterSet:
    n_all = int(cfg.num_clusters)
    n = n_all - 1
    m = int(cfg.rays_per_cluster)
    c = cfg.speed_of_light
    zod0, aod0, zoa0, aoa0, dist = los_angles(cfg)

    u = rng.random(n)
    excess = np.sort(-cfg.delay_scaling * cfg.delay_spread * np.log1p(-u))
    shadow = rng.normal(0.0, 1.0, n) * cfg.cluster_shadowing_db
    if cfg.delay_spread > 0:
        p = np.exp(-excess * (cfg.delay_scaling - 1.0) / (cfg.delay_scaling * cfg.delay_spread))
    else:
        p = np.ones(n)
    p = p * 10.0 ** (-shadow / 10.0)
    if n:
        k = cfg.k_factor
        powers = np.concatenate([[k / (1.0 + k)], p / p.sum() / (1.0 + k)])
    else:
        powers = np.ones(1)

    g = rng.normal(size=(4, n))
    aod = wrap_angle(aod0 + math.radians(cfg.asd_deg) * g[0])
    zod = _fold_zenith(zod0 + math.radians(cfg.zsd_deg) * g[1])
    perm = rng.permutation(n)
    aoa = wrap_angle(aoa0 + math.radians(cfg.asa_deg) * g[2])[perm]
    zoa = _fold_zenith(zoa0 + math.radians(cfg.zsa_deg) * g[3])[perm]

    zeros = np.zeros((n_all, m))
    return ClusterSet(
        delays=dist / c + np.concatenate([[0.0], excess]),
        powers=powers,
        aod=np.concatenate([[aod0], np.atleast_1d(aod)]),
        zod=np.concatenate([[zod0], zod]),
        aoa=np.concatenate([[aoa0], np.atleast_1d(aoa)]),
        zoa=np.concatenate([[zoa0], zoa]),
        k_factor=cfg.k_factor,
        los_distance=dist,
        ray_aod_offset=zeros, ray_zod_offset=zeros, ray_aoa_offset=zeros, ray_zoa_offset=zeros,
        ray_delay_offset=zeros, phases=np.zeros((n_all, m, 4)), xpr=np.ones((n_all, m)),
    )


def generate_rays(cfg: ScenarioConfig, clusters: ClusterSet, rng: np.random.Generator) -> ClusterSet:
    """Fill intra-cluster offsets, phases and XPR. The LoS cluster keeps zeros."""
    n_all = clusters.num_clusters
    m = int(cfg.rays_per_cluster)
    table = ray_offset_table(m)
    spreads = [math.radians(cfg.cluster_asd_deg), math.radians(cfg.cluster_zsd_deg),
               math.radians(cfg.cluster_asa_deg), math.radians(cfg.cluster_zsa_deg)]
    offsets = np.zeros((4, n_all, m))
    for n in range(1, n_all):
        for k in range(4):
            offsets[k, n] = spreads[k] * table[rng.permutation(m)]
    delay_off = np.zeros((n_all, m))
    delay_off[1:] = cfg.cluster_delay_spread * rng.random((n_all - 1, m))
    phases = np.zeros((n_all, m, 4))
    phases[1:] = rng.uniform(-np.pi, np.pi, (n_all - 1, m, 4))
    xpr = np.ones((n_all, m))
    xpr[1:] = 10.0 ** (rng.normal(cfg.xpr_mean_db, cfg.xpr_std_db, (n_all - 1, m)) / 10.0)
    return ClusterSet(
        delays=clusters.delays, powers=clusters.powers,
        aod=clusters.aod, zod=clusters.zod, aoa=clusters.aoa, zoa=clusters.zoa,
        k_factor=clusters.k_factor, los_distance=clusters.los_distance,
        ray_aod_offset=offsets[0], ray_zod_offset=offsets[1],
        ray_aoa_offset=offsets[2], ray_zoa_offset=offsets[3],
        ray_delay_offset=delay_off, phases=phases, xpr=xpr,
    )
