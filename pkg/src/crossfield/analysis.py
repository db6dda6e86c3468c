"""Post-processing: PDAP, spatial correlation, EDoF, NF-probability sweeps and CF/FF comparison."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cluster_gen import ArraySpec, ScenarioConfig, generate_clusters
from .errors import ConfigError, ConsistencyError
from .nf_boundary import AngleFrame, Region, classify
from .pipeline import draw, make_rng, realize
from .synthesis import ChannelRealization, Mode
from .twin_scatterer import Layout, place_twins, relative_position


class Window(str, enum.Enum):
    RECT = "rect"
    HANN = "hann"


@dataclass(frozen=True)
class Pdap:
    """Power over (scan angle, delay) in dB, normalised so an on-bin unit path reads 0 dB."""

    delays: np.ndarray
    angles: np.ndarray
    power_db: np.ndarray
    threshold_db: float
    mpcs: list = field(default_factory=list)


def pdap(cfr, freqs, angles=None, window: Window = Window.RECT, threshold_offset_db: float = 30.0) -> Pdap:
    """Inverse DFT of each scan's frequency response plus threshold MPC picking.

    ``cfr`` has shape (A, F) for A scan angles. MPCs are local maxima along
    delay that exceed ``max power - threshold_offset_db``.
    """
    h = np.atleast_2d(np.asarray(cfr, dtype=complex))
    f = np.asarray(freqs, dtype=float)
    if f.size < 2 or h.shape[1] != f.size:
        raise ValueError("need at least two frequency points matching the CFR length")
    step = np.diff(f)
    if not np.allclose(step, step[0], rtol=1e-9, atol=0.0) or step[0] <= 0:
        raise ValueError("frequency grid must be uniform and increasing")
    n = f.size
    w = np.hanning(n + 2)[1:-1] if Window(window) is Window.HANN else np.ones(n)
    imp = np.fft.ifft(h * w, axis=1) * n / w.sum()
    power = np.abs(imp) ** 2
    with np.errstate(divide="ignore"):
        pdb = 10.0 * np.log10(power)
    delays = np.arange(n) / (n * step[0])
    ang = np.arange(h.shape[0], dtype=float) if angles is None else np.asarray(angles, dtype=float)
    thr = float(pdb.max()) - threshold_offset_db
    mpcs = []
    for a in range(pdb.shape[0]):
        row = pdb[a]
        left = np.roll(row, 1)
        right = np.roll(row, -1)
        for k in np.nonzero((row >= left) & (row > right) & (row > thr))[0]:
            mpcs.append((float(ang[a]), float(delays[k]), float(row[k])))
    return Pdap(delays, ang, pdb, thr, mpcs)


def spatial_correlation(h) -> np.ndarray:
    """Normalised correlation R = H H^* / (|H| |H|^T) of the rows of H."""
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    norms = np.linalg.norm(h, axis=1)
    bad = np.nonzero(norms == 0.0)[0]
    if bad.size:
        raise ValueError(f"row {int(bad[0])} has zero norm")
    r = (h @ h.conj().T) / np.outer(norms, norms)
    r = 0.5 * (r + r.conj().T)
    np.fill_diagonal(r, 1.0)
    return r


def edof(r) -> float:
    """Effective degrees of freedom (tr R / |R|_F)^2."""
    r = np.asarray(r)
    return float(abs(np.trace(r)) ** 2 / np.sum(np.abs(r) ** 2))


# NF-probability sweep ------------------------------------------------------

@dataclass(frozen=True)
class SweepArray:
    name: str
    array: ArraySpec
    tx_height: float


DEFAULT_SWEEP_ARRAYS = (
    SweepArray("4x4", ArraySpec("UPA", 4, 4, 3.0, plane="yz"), 25.0),
    SweepArray("8x8", ArraySpec("UPA", 8, 8, 3.0, plane="yz"), 25.0),
    SweepArray("16x16", ArraySpec("UPA", 16, 16, 3.0, plane="yz"), 25.0),
    SweepArray("9x21", ArraySpec("UPA", 9, 21, 3.0, plane="yz"), 31.5),
)


@dataclass(frozen=True)
class SweepConfig:
    arrays: tuple = DEFAULT_SWEEP_ARRAYS
    frequencies: tuple = (2.6e9, 140e9)
    distances: tuple = (10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0, 10000.0)
    trials: int = 20

    def __post_init__(self):
        if not self.arrays:
            raise ConfigError("arrays", "sweep needs at least one array")
        if not self.frequencies or not self.distances:
            raise ConfigError("distances", "sweep grid is empty")
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")


@dataclass(frozen=True)
class SweepRow:
    array: str
    frequency: float
    d2d: float
    ff_delay: float
    ff_eod: float
    ff_aod: float
    trials: int
    scatterers: int


@dataclass(frozen=True)
class SweepResult:
    rows: list

    def lookup(self, array: str, frequency: float, d2d: float) -> SweepRow:
        for row in self.rows:
            if row.array == array and row.frequency == frequency and row.d2d == d2d:
                return row
        raise KeyError((array, frequency, d2d))


def sweep_cell(cfg: ScenarioConfig, trials: int, rng: np.random.Generator):
    """Classify every FBS of ``trials`` drops; returns FF counts and the total."""
    tx = cfg.tx_geometry()
    ant = cfg.tx_antenna.spec()
    frame = AngleFrame(cfg.angle_frame)
    layout = Layout(cfg.tx_position(), cfg.rx_position(), cfg.speed_of_light)
    counts = np.zeros(3, dtype=int)
    total = 0
    for _ in range(trials):
        clusters = generate_clusters(cfg, rng)
        twins = place_twins(clusters, layout, rng, (cfg.split_min, cfg.split_max), cfg.one_bounce_probability,
                             cfg.split_reference)
        for tw in twins:
            rep = classify(tx, relative_position(tw.fbs, tx), ant, cfg.wavelength, cfg.general_angles, frame)
            counts += [rep.delay_t1 is Region.FF, rep.zenith is Region.FF, rep.azimuth is Region.FF]
            total += 1
    return counts, total


def nf_probability_sweep(base: ScenarioConfig, sweep: SweepConfig, seed: int | None = None,
                         lsp=None) -> SweepResult:
    """FF fractions of first-bounce scatterers over (array, frequency, distance).

    Each grid cell draws from its own stream seeded by (seed, cell index).
    ``lsp`` optionally maps (frequency, d2d) to a dict of ScenarioConfig
    overrides, e.g. distance-dependent spreads.
    """
    seed = base.seed if seed is None else seed
    rows = []
    idx = 0
    for arr in sweep.arrays:
        for f in sweep.frequencies:
            for d in sweep.distances:
                over = dict(lsp(f, d)) if lsp is not None else {}
                cfg = replace(base, carrier_frequency=f, d2d=d, tx_array=arr.array, tx_height=arr.tx_height,
                              tx_center=None, rx_center=None, **over)
                counts, total = sweep_cell(cfg, sweep.trials, make_rng(seed, idx))
                frac = counts / total
                rows.append(SweepRow(arr.name, f, d, float(frac[0]), float(frac[1]), float(frac[2]),
                                     sweep.trials, total))
                idx += 1
    return SweepResult(rows)


# CF versus FF comparison ---------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    phase_diff: np.ndarray
    gain_diff_db: np.ndarray

    def summary(self) -> dict:
        ap = np.abs(self.phase_diff)
        g = self.gain_diff_db
        return {
            "rays": int(ap.size),
            "median_abs_phase": float(np.median(ap)),
            "mean_abs_phase": float(np.mean(ap)),
            "max_abs_phase": float(np.max(ap)),
            "median_abs_gain_db": float(np.median(np.abs(g))),
            "max_abs_gain_db": float(np.max(np.abs(g))),
            "frac_gain_within_10db": float(np.mean(np.abs(g) <= 10.0)),
        }


def _carrier_phasors(real: ChannelRealization) -> np.ndarray:
    fc = real.carrier_frequency
    los = real.los_coefficients * np.exp(-2j * np.pi * fc * real.los_delays)
    sc = real.coefficients * np.exp(-2j * np.pi * fc * real.delays)
    return np.concatenate([los.ravel(), sc.ravel()])


def cf_ff_compare(cross: ChannelRealization, far: ChannelRealization) -> Comparison:
    """Per-ray phase and gain difference (cross-field minus far-field) at the carrier.

    Phases are the principal arguments of each coefficient, so the
    difference lies in (-2*pi, 2*pi).
    """
    if cross.coefficients.shape != far.coefficients.shape or cross.los_coefficients.shape != far.los_coefficients.shape:
        raise ConsistencyError("realisations have different structure")
    a, b = _carrier_phasors(cross), _carrier_phasors(far)
    phase = np.angle(a) - np.angle(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = 20.0 * np.log10(np.abs(a) / np.abs(b))
    gain = np.where(np.isfinite(gain), gain, 0.0)
    return Comparison(phase, gain)


def cf_ff_runs(cfg: ScenarioConfig, seeds, cross_mode: Mode = Mode.CASCADE) -> Comparison:
    """Pool CF/FF differences over drops; both modes share each drop."""
    phase, gain = [], []
    for seed in seeds:
        drop = draw(cfg, make_rng(seed))
        comp = cf_ff_compare(realize(drop, cross_mode), realize(drop, Mode.FORCE_FF))
        phase.append(comp.phase_diff)
        gain.append(comp.gain_diff_db)
    if not phase:
        raise ConfigError("trials", "need at least one drop")
    return Comparison(np.concatenate(phase), np.concatenate(gain))


def histogram(values, bin_width: float, lo: float | None = None, hi: float | None = None):
    """(bin_lo, bin_hi, count) rows with edges aligned to multiples of bin_width."""
    v = np.asarray(values, dtype=float)
    lo = math.floor(v.min() / bin_width) * bin_width if lo is None else lo
    hi = math.ceil(v.max() / bin_width) * bin_width if hi is None else hi
    if hi <= lo:
        hi = lo + bin_width
    edges = lo + bin_width * np.arange(int(round((hi - lo) / bin_width)) + 1)
    counts, _ = np.histogram(v, edges)
    return [(float(a), float(b), int(c)) for a, b, c in zip(edges[:-1], edges[1:], counts)]
