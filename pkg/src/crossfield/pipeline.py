"""End-to-end realisation: clusters, twin scatterers, per-element parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cluster_gen import ClusterSet, ScenarioConfig, generate_clusters, generate_rays
from .nf_boundary import AngleFrame
from .synthesis import ChannelRealization, Mode, assemble, element_params
from .twin_scatterer import Layout, TwinScatterer, place_twins


@dataclass(frozen=True)
class Drop:
    """Random draw shared by every synthesis mode of one realisation."""

    cfg: ScenarioConfig
    clusters: ClusterSet
    twins: list[TwinScatterer]


def make_rng(seed, *stream) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


def draw(cfg: ScenarioConfig, rng: np.random.Generator) -> Drop:
    clusters = generate_clusters(cfg, rng)
    clusters = generate_rays(cfg, clusters, rng)
    layout = Layout(cfg.tx_position(), cfg.rx_position(), cfg.speed_of_light)
    twins = place_twins(clusters, layout, rng, (cfg.split_min, cfg.split_max), cfg.one_bounce_probability,
                             cfg.split_reference)
    return Drop(cfg, clusters, twins)


def realize(drop: Drop, mode: Mode = Mode.CASCADE, t: float | None = None) -> ChannelRealization:
    cfg = drop.cfg
    lam = cfg.wavelength
    frame = AngleFrame(cfg.angle_frame)
    tx, rx = cfg.tx_geometry(), cfg.rx_geometry()
    ta, ra = cfg.tx_antenna.spec(), cfg.rx_antenna.spec()
    general = cfg.general_angles
    tp = [element_params(tx, tw.fbs, ta, lam, mode, frame, general) for tw in drop.twins]
    rp = [element_params(rx, tw.lbs, ra, lam, mode, frame, general) for tw in drop.twins]
    los = (element_params(tx, rx.center, ta, lam, mode, frame, general),
           element_params(rx, tx.center, ra, lam, mode, frame, general))
    real = assemble(cfg, drop.clusters, drop.twins, tp, rp, tx, rx, ta, ra, los,
                    cfg.time if t is None else t, mode)
    real.metadata.update(seed=cfg.seed, mode=Mode(mode).value)
    return real


def simulate(cfg: ScenarioConfig, mode: Mode = Mode.CASCADE, seed: int | None = None) -> tuple[Drop, ChannelRealization]:
    drop = draw(cfg, make_rng(cfg.seed if seed is None else seed))
    return drop, realize(drop, mode)
