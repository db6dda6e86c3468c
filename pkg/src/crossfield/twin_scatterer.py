"""Placement of first-/last-bounce scatterer pairs for scattered clusters.

Each scattered path of length L = c*tau_n is split into r_T (Tx to FBS),
r_V (FBS to LBS) and r_R (LBS to Rx). The FBS sits on the departure ray and
the LBS on the arrival ray. For a given r_T the residual

    f(r_R) = r_T + r_R + |P_F(r_T) - P_L(r_R)| - L

is nondecreasing in r_R with slope in [0, 2], so bisection on [0, L]
converges whenever f(0) <= 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cluster_gen import ClusterSet
from .errors import DomainError
from .geometry import ArrayGeometry, ScattererSpherical, cartesian_to_spherical, unit_vector

log = logging.getLogger(__name__)

MAX_RESAMPLES = 100
SOLVE_TOL = 1e-10


@dataclass(frozen=True)
class Layout:
    tx: np.ndarray
    rx: np.ndarray
    speed_of_light: float = 3.0e8


@dataclass(frozen=True)
class TwinScatterer:
    """A placed FBS/LBS pair with the path split and the angles it realises.

    ``kind`` is ``two_bounce``, ``one_bounce`` (FBS and LBS coincide, placed
    on the arrival ray with the departure angle taken from the geometry) or
    ``degenerate`` (fallback, delay renormalised).
    """

    cluster: int
    fbs: np.ndarray
    lbs: np.ndarray
    r_t: float
    r_v: float
    r_r: float
    delay: float
    zod: float
    aod: float
    zoa: float
    aoa: float
    kind: str = "two_bounce"

    @property
    def length(self) -> float:
        return self.r_t + self.r_v + self.r_r


def ellipse_distance(total: float, origin: np.ndarray, u: np.ndarray, other: np.ndarray) -> float:
    """Distance t along ``u`` from ``origin`` where t + |origin + t*u - other| = total."""
    w = other - origin
    d = float(np.linalg.norm(w))
    return (total * total - d * d) / (2.0 * (total - float(u @ w)))


def residual(r_t: float, r_r: float, layout: Layout, u_t: np.ndarray, u_r: np.ndarray, total: float) -> float:
    fbs = layout.tx + r_t * u_t
    lbs = layout.rx + r_r * u_r
    return r_t + r_r + float(np.linalg.norm(fbs - lbs)) - total


def solve_r_r(layout: Layout, u_t: np.ndarray, u_r: np.ndarray, r_t: float, total: float) -> float:
    """Root of f(r_R) for a fixed r_T; requires f(0) <= 0."""
    fbs = (layout.tx + r_t * u_t)[None, :]
    out = kernels.solve_rr_batch(layout.tx, layout.rx, fbs, u_r[None, :], np.array([r_t]), np.array([total]),
                                 SOLVE_TOL)
    return float(out[0])


def _twin(n, layout, u_t, u_r, r_t, r_r, delay, kind):
    fbs = layout.tx + r_t * u_t
    lbs = layout.rx + r_r * u_r
    _, zod, aod = cartesian_to_spherical(u_t)
    _, zoa, aoa = cartesian_to_spherical(u_r)
    return TwinScatterer(n, fbs, lbs, float(r_t), float(np.linalg.norm(fbs - lbs)), float(r_r), delay,
                         float(zod), float(aod), float(zoa), float(aoa), kind)


def place_twins(clusters: ClusterSet, layout: Layout, rng: np.random.Generator, split=(0.2, 0.8),
                one_bounce_probability: float = 0.0, split_reference: str = "ellipse") -> list[TwinScatterer]:
    """Place one twin pair per scattered cluster (indices 1..N-1).

    r_T is a fraction beta ~ U(split) of a reference length: the excess
    length L - |Tx - Rx| (``excess``) or the distance along the departure ray
    to the delay ellipse (``ellipse``). beta is redrawn while the FBS falls
    outside the ellipse. Random numbers are drawn up front per cluster so the
    result does not depend on how many redraws other clusters needed.
    """
    if split_reference not in ("excess", "ellipse"):
        raise ValueError(f"unknown split reference {split_reference!r}")
    n_scat = clusters.num_clusters - 1
    betas = rng.uniform(split[0], split[1], (n_scat, MAX_RESAMPLES))
    coin = rng.random(n_scat)
    c = layout.speed_of_light
    d = float(np.linalg.norm(layout.rx - layout.tx))
    twins = []
    pending = []
    for i in range(n_scat):
        n = i + 1
        total = c * clusters.delays[n]
        u_t = unit_vector(clusters.zod[n], clusters.aod[n])
        u_r = unit_vector(clusters.zoa[n], clusters.aoa[n])
        excess = total - d
        if excess <= 1e-12 * total:
            r_t = betas[i, 0] * d
            fbs = layout.tx + r_t * u_t
            r_r = float(np.linalg.norm(fbs - layout.rx))
            log.warning("cluster %d has no excess delay; using single-bounce fallback", n)
            u_r = (fbs - layout.rx) / r_r
            twins.append(_twin(n, layout, u_t, u_r, r_t, r_r, (r_t + r_r) / c, "degenerate"))
            continue
        if coin[i] < one_bounce_probability:
            r_r = ellipse_distance(total, layout.rx, u_r, layout.tx)
            point = layout.rx + r_r * u_r
            r_t = float(np.linalg.norm(point - layout.tx))
            twins.append(_twin(n, layout, (point - layout.tx) / r_t, u_r, r_t, r_r, clusters.delays[n],
                               "one_bounce"))
            continue
        r_max = ellipse_distance(total, layout.tx, u_t, layout.rx)
        ref = excess if split_reference == "excess" else r_max
        feasible = betas[i] * ref < r_max
        if not feasible.any():
            r_t = betas[i, 0] * d
            fbs = layout.tx + r_t * u_t
            r_r = float(np.linalg.norm(fbs - layout.rx))
            log.warning("cluster %d infeasible after %d draws; using single-bounce fallback", n, MAX_RESAMPLES)
            u_r = (fbs - layout.rx) / r_r
            twins.append(_twin(n, layout, u_t, u_r, r_t, r_r, (r_t + r_r) / c, "degenerate"))
            continue
        r_t = float(betas[i, int(np.argmax(feasible))] * ref)
        twins.append(None)
        pending.append((len(twins) - 1, n, u_t, u_r, r_t, total))
    if pending:
        fbs = np.array([layout.tx + p[4] * p[2] for p in pending])
        u_r = np.array([p[3] for p in pending])
        r_t = np.array([p[4] for p in pending])
        totals = np.array([p[5] for p in pending])
        r_r = kernels.solve_rr_batch(layout.tx, layout.rx, fbs, u_r, r_t, totals, SOLVE_TOL)
        for (slot, n, u_t, u_r1, rt, _), rr in zip(pending, r_r):
            twins[slot] = _twin(n, layout, u_t, u_r1, rt, float(rr), clusters.delays[n], "two_bounce")
    return twins


def relative_position(point, array: ArrayGeometry) -> ScattererSpherical:
    """Spherical coordinates of a global point in the array's local frame."""
    v = array.to_local(point)
    if not np.linalg.norm(v) > 0:
        raise DomainError("point coincides with the array center")
    return ScattererSpherical.from_cartesian(v, frame="local")


def to_global(s: ScattererSpherical, array: ArrayGeometry) -> np.ndarray:
    return array.to_global(s.cartesian())
