"""Command-line entry point.

Every subcommand writes its CSV results and a ``run_manifest.json`` into
``--out``. Exit status: 0 on success, 2 on configuration errors (the message
names the offending key), 1 on runtime errors or failed self-checks.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .analysis import cf_ff_runs, edof, histogram, nf_probability_sweep, spatial_correlation
from .config import COMPARE_PRESET, SWEEP_PRESET, LoadedConfig, config_hash, load_config, parse_config
from .errors import ConfigError, CrossFieldError
from .geometry import SPEED_OF_LIGHT, ScattererSpherical, aperture, elevation_wrt_array, ula
from .nf_boundary import (classify, fresnel_general, fresnel_worst, rayleigh_general, rayleigh_worst,
                          subarray_rayleigh, zenith_boundary)
from .pipeline import draw, make_rng, realize
from .range_approx import PHASE_LIMIT, TAYLOR1, TAYLOR2, RangeMethod, phase_error_profile, threshold_crossing
from .synthesis import Mode, frequency_response
from .twin_scatterer import relative_position
from .writers import MANIFEST_NAME, read_csv, write_csv, write_manifest

log = logging.getLogger("crossfield")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML scenario file")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--trials", type=int, help="Monte-Carlo drops")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--force-ff", action="store_true", help="treat every scatterer as far-field")
    mode.add_argument("--force-exact", action="store_true", help="exact spherical ranges and angles everywhere")
    p.add_argument("--dump-scatterers", action="store_true", help="also write the placed twin scatterers")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crossfield", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("boundaries", help="NF/FF boundaries against aperture size")
    _common(p)
    p.add_argument("--d-min", type=float, default=0.1)
    p.add_argument("--d-max", type=float, default=100.0)
    p.add_argument("--points", type=int, default=61)
    p.add_argument("--freq", type=float, default=100e9)
    p.add_argument("--theta-deg", type=float, default=45.0)
    p.add_argument("--phi-deg", type=float, default=45.0)
    p.add_argument("--hpbw-v-deg", type=float, default=120.0)

    p = sub.add_parser("phase-error", help="per-element range phase error of a ULA")
    _common(p)
    p.add_argument("--elements", type=int, default=256)
    p.add_argument("--freq", type=float, default=100e9)
    p.add_argument("--spacing", type=float, help="element spacing in m (default half wavelength)")
    p.add_argument("--r", type=float, default=5.0)
    p.add_argument("--theta-deg", type=float, default=45.0)
    p.add_argument("--phi-deg", type=float, default=0.0)
    p.add_argument("--subarrays", type=int, default=4)

    p = sub.add_parser("generate", help="one channel realisation")
    _common(p)
    p = sub.add_parser("nf-prob", help="FF probability of first-bounce scatterers over a grid")
    _common(p)
    p = sub.add_parser("compare-ff", help="cross-field versus far-field phase and gain differences")
    _common(p)
    p.add_argument("--phase-bin", type=float, default=math.pi / 16)
    p.add_argument("--gain-bin", type=float, default=1.0)

    p = sub.add_parser("edof", help="effective degrees of freedom per array side")
    _common(p)
    p.add_argument("--input", help="rays.csv from 'generate' or a CFR CSV (f_Hz,u,s,re,im)")
    p.add_argument("--freq", type=float, help="carrier of a rays.csv input (default: from its run manifest)")
    p.add_argument("--bandwidth", type=float, default=100e6)
    p.add_argument("--points", type=int, default=64)

    p = sub.add_parser("selftest", help="golden boundary and crossing checks")
    _common(p)
    return ap


def _mode(args) -> Mode:
    if args.force_ff:
        return Mode.FORCE_FF
    if args.force_exact:
        return Mode.FORCE_EXACT
    return Mode.CASCADE


def _load(args, preset=None) -> LoadedConfig:
    cfg = load_config(args.config, preset) if args.config else parse_config("", preset)
    if args.seed is not None:
        cfg = LoadedConfig(replace(cfg.scenario, seed=args.seed), cfg.sweep, cfg.raw)
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("--trials", "must be >= 1")
        cfg = LoadedConfig(cfg.scenario, replace(cfg.sweep, trials=args.trials), cfg.raw)
    return cfg


class _Run:
    """Collects output paths; the manifest is written before any result file."""

    def __init__(self, args, cfg_hash: str, seed, names, extra=None):
        self.dir = args.out
        os.makedirs(self.dir, exist_ok=True)
        self.names = list(names)
        write_manifest(self.dir, args.command, cfg_hash, seed, self.names, extra)

    def path(self, name: str) -> str:
        if name not in self.names:
            raise CrossFieldError(f"{name} was not declared in the manifest")
        return os.path.join(self.dir, name)


def _params(args, *names) -> dict:
    return {n: getattr(args, n) for n in names}


# subcommands ---------------------------------------------------------------

def cmd_boundaries(args) -> int:
    if not (0 < args.d_min < args.d_max) or args.points < 2:
        raise ConfigError("--d-min", "need 0 < d_min < d_max and at least two points")
    if not args.freq > 0:
        raise ConfigError("--freq", "must be positive")
    lam = SPEED_OF_LIGHT / args.freq
    th, ph = math.radians(args.theta_deg), math.radians(args.phi_deg)
    hpbw = math.radians(args.hpbw_v_deg)
    # elevation of the direction seen from a ULA along local y
    tp = elevation_wrt_array(ula(2, 1.0), ScattererSpherical(1.0, th, ph).unit)
    run = _Run(args, config_hash(_params(args, "d_min", "d_max", "points", "freq", "theta_deg", "phi_deg",
                                         "hpbw_v_deg")), None, ["boundaries.csv"])
    rows = []
    for D in np.geomspace(args.d_min, args.d_max, args.points):
        rows.append((D, rayleigh_worst(D, lam), fresnel_worst(D, lam), rayleigh_general(D, lam, th),
                     fresnel_general(D, lam, th, ph), zenith_boundary(D, tp, hpbw)))
    write_csv(run.path("boundaries.csv"), ["aperture_m", "rayleigh_m", "fresnel_m", "rayleigh_general_m",
                                           "fresnel_general_m", "zenith_boundary_m"], rows)
    print(f"theta' = {math.degrees(tp):.6g} deg; wrote {len(rows)} rows to {run.path('boundaries.csv')}")
    return 0


def cmd_phase_error(args) -> int:
    if args.elements < 2:
        raise ConfigError("--elements", "need at least two elements")
    if not args.freq > 0:
        raise ConfigError("--freq", "must be positive")
    if args.subarrays < 1 or args.elements % args.subarrays:
        raise ConfigError("--subarrays", "must divide the element count")
    lam = SPEED_OF_LIGHT / args.freq
    spacing = lam / 2.0 if args.spacing is None else args.spacing
    if not spacing > 0:
        raise ConfigError("--spacing", "must be positive")
    geom = ula(args.elements, spacing)
    sc = ScattererSpherical(args.r, math.radians(args.theta_deg), math.radians(args.phi_deg))
    sub = RangeMethod.subarray(1, args.subarrays)
    methods = [TAYLOR1, TAYLOR2, sub]
    names = ["phase_error.csv", "crossings.csv", "phase_error_vs_size.csv"]
    run = _Run(args, config_hash(_params(args, "elements", "freq", "spacing", "r", "theta_deg", "phi_deg",
                                         "subarrays")), None, names)
    profiles = [phase_error_profile(geom, sc, lam, m) for m in methods]
    write_csv(run.path("phase_error.csv"), ["element", "taylor1_rad", "taylor2_rad", "subarray_rad"],
              zip(range(1, args.elements + 1), *(p.errors for p in profiles)))
    write_csv(run.path("crossings.csv"), ["method", "crossing_elements", "max_error_rad", "threshold_rad"],
              [(m.label(), threshold_crossing(spacing, sc, lam, m), p.max_error, PHASE_LIMIT)
               for m, p in zip(methods, profiles)])
    rows = []
    for n in range(2, args.elements + 1):
        g = ula(n, spacing)
        e1 = phase_error_profile(g, sc, lam, TAYLOR1).max_error
        e2 = phase_error_profile(g, sc, lam, TAYLOR2).max_error
        es = phase_error_profile(g, sc, lam, sub).max_error if n % args.subarrays == 0 else None
        rows.append((n, e1, e2, es))
    write_csv(run.path("phase_error_vs_size.csv"), ["elements", "taylor1_max_rad", "taylor2_max_rad",
                                                    "subarray_max_rad"], rows)
    for m, p in zip(methods, profiles):
        print(f"{m.label():10s} max error {p.max_error:.6g} rad, crossing at {p.crossing}")
    return 0


def _realize(cfg, mode):
    drop = draw(cfg, make_rng(cfg.seed))
    return drop, realize(drop, mode)


def _deg(x):
    return np.degrees(x)


def cmd_generate(args) -> int:
    loaded = _load(args)
    cfg = loaded.scenario
    mode = _mode(args)
    names = ["rays.csv", "los.csv"] + (["scatterers.csv"] if args.dump_scatterers else [])
    run = _Run(args, config_hash(cfg, mode.value), cfg.seed, names,
               {"carrier_frequency": cfg.carrier_frequency, "mode": mode.value})
    drop, real = _realize(cfg, mode)
    u_n, s_n, n_sc, m = real.coefficients.shape
    rows = []
    for u in range(u_n):
        for s in range(s_n):
            for k in range(n_sc):
                n = drop.twins[k].cluster
                for j in range(m):
                    h = real.coefficients[u, s, k, j]
                    rows.append((u, s, n, j, real.delays[u, s, k, j], h.real, h.imag,
                                 _deg(real.aod[s, k, j]), _deg(real.zod[s, k, j]),
                                 _deg(real.aoa[u, k, j]), _deg(real.zoa[u, k, j])))
    write_csv(run.path("rays.csv"), ["u", "s", "cluster", "ray", "delay_s", "re", "im", "aod_deg", "zod_deg",
                                     "aoa_deg", "zoa_deg"], rows)
    write_csv(run.path("los.csv"), ["u", "s", "delay_s", "re", "im"],
              [(u, s, real.los_delays[u, s], real.los_coefficients[u, s].real, real.los_coefficients[u, s].imag)
               for u in range(u_n) for s in range(s_n)])
    if args.dump_scatterers:
        _dump_scatterers(run.path("scatterers.csv"), drop, real)
    print(f"{mode.value}: {len(rows)} rays, {u_n}x{s_n} links -> {run.dir}")
    return 0


def _dump_scatterers(path, drop, real):
    rows = []
    for tw, pt in zip(drop.twins, real.tx_params):
        rep = pt.report
        rows.append((tw.cluster, tw.kind, *tw.fbs, *tw.lbs, tw.r_t, tw.r_v, tw.r_r, tw.delay,
                     _deg(tw.aod), _deg(tw.zod), _deg(tw.aoa), _deg(tw.zoa),
                     rep.delay_t1.value, rep.delay_t2.value, rep.zenith.value, rep.azimuth.value,
                     pt.delay_method.value))
    write_csv(path, ["cluster", "kind", "fbs_x", "fbs_y", "fbs_z", "lbs_x", "lbs_y", "lbs_z", "r_t_m", "r_v_m",
                     "r_r_m", "delay_s", "aod_deg", "zod_deg", "aoa_deg", "zoa_deg", "tx_delay_t1",
                     "tx_delay_t2", "tx_zenith", "tx_azimuth", "tx_delay_method"], rows)


def cmd_nf_prob(args) -> int:
    loaded = _load(args, SWEEP_PRESET)
    cfg, sweep = loaded.scenario, loaded.sweep
    names = ["nf_prob.csv"] + (["scatterers.csv"] if args.dump_scatterers else [])
    run = _Run(args, config_hash(cfg, sweep), cfg.seed, names)
    res = nf_probability_sweep(cfg, sweep, cfg.seed)
    write_csv(run.path("nf_prob.csv"), ["array", "f_Hz", "d2d_m", "ff_frac_delay", "ff_frac_eod", "ff_frac_aod"],
              [(r.array, r.frequency, r.d2d, r.ff_delay, r.ff_eod, r.ff_aod) for r in res.rows])
    if args.dump_scatterers:
        _dump_sweep_scatterers(run.path("scatterers.csv"), cfg, sweep)
    print(f"{len(res.rows)} grid cells -> {run.path('nf_prob.csv')}")
    return 0


def _dump_sweep_scatterers(path, base, sweep):
    """First-bounce scatterers of every sweep cell, regenerated from the same streams."""
    from .analysis import sweep_cell  # noqa: F401  (documents the stream layout)
    from .cluster_gen import generate_clusters
    from .nf_boundary import AngleFrame
    from .twin_scatterer import Layout, place_twins
    rows = []
    idx = 0
    for arr in sweep.arrays:
        for f in sweep.frequencies:
            for d in sweep.distances:
                cfg = replace(base, carrier_frequency=f, d2d=d, tx_array=arr.array, tx_height=arr.tx_height,
                              tx_center=None, rx_center=None)
                rng = make_rng(base.seed, idx)
                tx, ant = cfg.tx_geometry(), cfg.tx_antenna.spec()
                layout = Layout(cfg.tx_position(), cfg.rx_position(), cfg.speed_of_light)
                for trial in range(sweep.trials):
                    clusters = generate_clusters(cfg, rng)
                    twins = place_twins(clusters, layout, rng, (cfg.split_min, cfg.split_max),
                                        cfg.one_bounce_probability, cfg.split_reference)
                    for tw in twins:
                        rep = classify(tx, relative_position(tw.fbs, tx), ant, cfg.wavelength, cfg.general_angles,
                                       AngleFrame(cfg.angle_frame))
                        rows.append((arr.name, f, d, trial, tw.cluster, tw.kind, *tw.fbs, tw.r_t,
                                     rep.delay_t1.value, rep.zenith.value, rep.azimuth.value))
                idx += 1
    write_csv(path, ["array", "f_Hz", "d2d_m", "trial", "cluster", "kind", "fbs_x", "fbs_y", "fbs_z", "r_t_m",
                     "delay", "eod", "aod"], rows)


def cmd_compare_ff(args) -> int:
    loaded = _load(args, COMPARE_PRESET)
    cfg = loaded.scenario
    trials = args.trials if args.trials is not None else 5
    cross = Mode.FORCE_EXACT if args.force_exact else Mode.CASCADE
    if args.force_ff:
        raise ConfigError("--force-ff", "compare-ff already uses the far-field model as reference")
    if not (args.phase_bin > 0 and args.gain_bin > 0):
        raise ConfigError("--phase-bin", "bin widths must be positive")
    names = ["phase_hist.csv", "gain_hist.csv", "summary.csv"]
    run = _Run(args, config_hash(cfg, cross.value, trials, args.phase_bin, args.gain_bin), cfg.seed, names)
    seeds = [cfg.seed + i for i in range(trials)]
    comp = cf_ff_runs(cfg, seeds, cross)
    write_csv(run.path("phase_hist.csv"), ["bin_lo", "bin_hi", "count"],
              histogram(comp.phase_diff, args.phase_bin, -2 * math.pi, 2 * math.pi))
    write_csv(run.path("gain_hist.csv"), ["bin_lo", "bin_hi", "count"], histogram(comp.gain_diff_db, args.gain_bin))
    summary = comp.summary()
    write_csv(run.path("summary.csv"), ["key", "value"], sorted(summary.items()))
    print(", ".join(f"{k}={v:.6g}" for k, v in summary.items()))
    return 0


def _carrier_of(path, freq):
    if freq is not None:
        return freq
    manifest = os.path.join(os.path.dirname(os.path.abspath(path)), MANIFEST_NAME)
    try:
        with open(manifest, encoding="utf-8") as fh:
            return float(json.load(fh)["carrier_frequency"])
    except (OSError, KeyError, ValueError, TypeError):
        raise ConfigError("--freq", f"no carrier frequency for {path}; pass --freq") from None


def _cfr_from_file(path, bandwidth, points, freq=None):
    header, rows = read_csv(path)
    if {"f_Hz", "u", "s", "re", "im"} <= set(header):
        freqs = sorted({float(r["f_Hz"]) for r in rows})
        fi = {f: i for i, f in enumerate(freqs)}
        u_n = 1 + max(int(r["u"]) for r in rows)
        s_n = 1 + max(int(r["s"]) for r in rows)
        h = np.zeros((len(freqs), u_n, s_n), dtype=complex)
        for r in rows:
            h[fi[float(r["f_Hz"])], int(r["u"]), int(r["s"])] = complex(float(r["re"]), float(r["im"]))
        return h
    if {"u", "s", "delay_s", "re", "im"} <= set(header):
        los = os.path.join(os.path.dirname(os.path.abspath(path)), "los.csv")
        if os.path.basename(path) != "los.csv" and os.path.exists(los):
            rows = rows + read_csv(los)[1]
        u = np.array([int(r["u"]) for r in rows])
        s = np.array([int(r["s"]) for r in rows])
        tau = np.array([float(r["delay_s"]) for r in rows])
        g = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        freqs = _carrier_of(path, freq) + np.linspace(-bandwidth / 2, bandwidth / 2, points)
        h = np.zeros((points, u.max() + 1, s.max() + 1), dtype=complex)
        for i, f in enumerate(freqs):
            np.add.at(h[i], (u, s), g * np.exp(-2j * np.pi * f * tau))
        return h
    raise ConfigError("--input", f"{path}: unrecognised columns {header}")


def cmd_edof(args) -> int:
    if args.points < 1 or not args.bandwidth >= 0:
        raise ConfigError("--points", "need points >= 1 and bandwidth >= 0")
    if args.input:
        if not os.path.exists(args.input):
            raise ConfigError("--input", f"{args.input} does not exist")
        h = _cfr_from_file(args.input, args.bandwidth, args.points, args.freq)
        cfg_h = config_hash(os.path.abspath(args.input), args.bandwidth, args.points)
        seed = None
    else:
        cfg = _load(args).scenario
        _, real = _realize(cfg, _mode(args))
        fc = cfg.carrier_frequency
        h = frequency_response(real, fc + np.linspace(-args.bandwidth / 2, args.bandwidth / 2, args.points))
        cfg_h, seed = config_hash(cfg, _mode(args).value, args.bandwidth, args.points), cfg.seed
    run = _Run(args, cfg_h, seed, ["edof.csv"])
    f_n, u_n, s_n = h.shape
    rows = []
    # rows of each matrix are one side's elements; columns the other side's samples
    tx = np.transpose(h, (2, 0, 1)).reshape(s_n, -1)
    rx = np.transpose(h, (1, 0, 2)).reshape(u_n, -1)
    for side, mat in (("tx", tx), ("rx", rx)):
        val = edof(spatial_correlation(mat))
        rows.append((side, mat.shape[0], val))
        print(f"EDoF {side}: {val:.6f} ({mat.shape[0]} elements)")
    write_csv(run.path("edof.csv"), ["side", "elements", "edof"], rows)
    return 0


def selftest_checks():
    """(name, value, expected text, passed) for the golden boundary and crossing values."""
    lam = SPEED_OF_LIGHT / 100e9
    geom = ula(256, lam / 2)
    D = aperture(geom)
    sc = ScattererSpherical(5.0, math.pi / 4, 0.0)
    sub = RangeMethod.subarray(1, 4)
    ray, fre = rayleigh_worst(D, lam), fresnel_worst(D, lam)
    sray = subarray_rayleigh(geom, lam, 1, 4)
    c1 = threshold_crossing(lam / 2, sc, lam, TAYLOR1)
    c2 = threshold_crossing(lam / 2, sc, lam, TAYLOR2)
    se = phase_error_profile(geom, sc, lam, sub).max_error
    return [
        ("rayleigh_worst_m", ray, "97.5375 +/- 1e-3", abs(ray - 97.5375) <= 1e-3),
        ("fresnel_worst_m", fre, "2.6778 +/- 1e-3", abs(fre - 2.6778) <= 1e-3),
        ("subarray_rayleigh_m", sray, "5.9535 +/- 1e-3", abs(sray - 5.9535) <= 1e-3),
        ("taylor1_crossing", c1, "56 +/- 3", c1 is not None and abs(c1 - 56) <= 3),
        ("taylor2_crossing", c2, "386 +/- 5", c2 is not None and abs(c2 - 386) <= 5),
        ("subarray_max_error_rad", se, f"< {PHASE_LIMIT:.6f}", se < PHASE_LIMIT),
    ]


def cmd_selftest(args) -> int:
    checks = selftest_checks()
    run = _Run(args, config_hash("selftest"), None, ["selftest.csv"])
    write_csv(run.path("selftest.csv"), ["check", "value", "expected", "pass"], checks)
    for name, value, expected, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name} = {value} (expected {expected})")
    return 0 if all(c[3] for c in checks) else 1


COMMANDS = {
    "boundaries": cmd_boundaries,
    "phase-error": cmd_phase_error,
    "generate": cmd_generate,
    "nf-prob": cmd_nf_prob,
    "compare-ff": cmd_compare_ff,
    "edof": cmd_edof,
    "selftest": cmd_selftest,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime error", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
