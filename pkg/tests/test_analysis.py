import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from crossfield.analysis import (DEFAULT_SWEEP_ARRAYS, SweepConfig, Window, cf_ff_compare, cf_ff_runs, edof,
                                 histogram, nf_probability_sweep, pdap, spatial_correlation)
from crossfield.cluster_gen import ScenarioConfig
from crossfield.config import SWEEP_PRESET
from crossfield.errors import ConfigError, ConsistencyError
from crossfield.pipeline import draw, make_rng, realize
from crossfield.synthesis import Mode

import oracles

EDOF_RHO_HALF = 1.6


def _cfr(paths, freqs):
    f = np.asarray(freqs)
    return sum(a * np.exp(-2j * np.pi * f * tau) for a, tau in paths)


def test_pdap_single_path_on_bin():
    n, step = 200, 5e6
    f = 1e9 + step * np.arange(n)
    k = 37
    tau = k / (n * step)
    p = pdap(_cfr([(1.0, tau)], f)[None, :], f)
    assert int(np.argmax(p.power_db[0])) == k
    assert p.power_db[0, k] == pytest.approx(0.0, abs=1e-9)
    assert p.delays[1] - p.delays[0] == pytest.approx(1 / (n * step))


def test_pdap_two_resolved_paths():
    n, step = 256, 4e6
    f = step * np.arange(n)
    bin_w = 1 / (n * step)
    p = pdap(_cfr([(1.0, 10 * bin_w), (0.5, 14 * bin_w)], f)[None, :], f)
    found = sorted(round(d / bin_w) for _, d, _ in p.mpcs)
    assert found == [10, 14]


def test_pdap_sixty_ghz_round_trip():
    n, step = 2000, 30e6
    f = 270e9 + step * np.arange(n)
    bin_w = 1 / (n * step)
    assert bin_w == pytest.approx(16.7e-12, rel=0.01)
    truth = [(1.0, 3.3001e-9), (0.5, 7.7713e-9), (0.3, 12.0129e-9)]
    p = pdap(_cfr(truth, f)[None, :], f, window=Window.HANN)
    strongest = sorted(p.mpcs, key=lambda m: -m[2])[:3]
    got = sorted(d for _, d, _ in strongest)
    for (_, tau), d in zip(sorted(truth, key=lambda t: t[1]), got):
        assert abs(d - tau) <= bin_w / 2


def test_pdap_angles_and_errors():
    f = np.arange(8) * 1e6
    p = pdap(np.ones((3, 8)), f, angles=[-0.1, 0.0, 0.1])
    np.testing.assert_array_equal(p.angles, [-0.1, 0.0, 0.1])
    with pytest.raises(ValueError):
        pdap(np.ones(4), [0.0, 1.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        pdap(np.ones(1), [0.0])


def test_correlation_examples():
    np.testing.assert_allclose(spatial_correlation(np.ones((3, 4))), np.ones((3, 3)), atol=1e-15)
    np.testing.assert_allclose(spatial_correlation(np.eye(4)), np.eye(4), atol=1e-15)
    rho = 0.5
    r = spatial_correlation([[1.0, 0.0], [rho, math.sqrt(1 - rho ** 2)]])
    assert r[0, 1] == pytest.approx(0.5, abs=1e-15)


def test_correlation_zero_row():
    with pytest.raises(ValueError, match="row 1"):
        spatial_correlation([[1.0, 2.0], [0.0, 0.0]])


def test_edof_examples():
    assert edof(np.ones((4, 4))) == pytest.approx(1.0)
    assert edof(np.eye(4)) == pytest.approx(4.0)
    m = [[1, mp.mpf("0.5")], [mp.mpf("0.5"), 1]]
    assert float(oracles.edof(m)) == pytest.approx(EDOF_RHO_HALF, rel=1e-15)
    assert edof(np.array([[1, 0.5], [0.5, 1]])) == pytest.approx(EDOF_RHO_HALF, rel=1e-14)


complex_rows = hnp.arrays(np.complex128, st.tuples(st.integers(1, 6), st.integers(1, 6)),
                          elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))


@settings(max_examples=300, deadline=None)
@given(complex_rows)
def test_correlation_properties(h):
    norms = np.linalg.norm(h, axis=1)
    if np.any(norms < 1e-150) or np.any(~np.isfinite(norms)):
        return
    r = spatial_correlation(h)
    np.testing.assert_array_equal(r, r.conj().T)
    np.testing.assert_array_equal(np.diag(r), 1.0)
    assert np.all(np.abs(r) <= 1 + 1e-12)
    e = edof(r)
    assert 1.0 - 1e-12 <= e <= h.shape[0] + 1e-12


def test_histogram_alignment():
    rows = histogram([0.1, 0.2, 1.5, -0.4], 0.5)
    assert rows[0][0] == -0.5 and rows[-1][1] == 1.5  # last bin is closed on the right
    assert sum(c for _, _, c in rows) == 4
    fixed = histogram([0.1], 1.0, lo=-2.0, hi=2.0)
    assert len(fixed) == 4 and fixed[2][2] == 1


SMALL = SweepConfig(arrays=DEFAULT_SWEEP_ARRAYS[:1], frequencies=(2.6e9, 140e9), distances=(30.0, 3000.0), trials=3)


def test_sweep_determinism_and_ranges():
    base = ScenarioConfig(**SWEEP_PRESET)
    a = nf_probability_sweep(base, SMALL, seed=5)
    b = nf_probability_sweep(base, SMALL, seed=5)
    c = nf_probability_sweep(base, SMALL, seed=6)
    assert a == b
    assert a != c
    for row in a.rows:
        for v in (row.ff_delay, row.ff_eod, row.ff_aod):
            assert 0.0 <= v <= 1.0
        assert row.trials == 3 and row.scatterers == 3 * (base.num_clusters - 1)
    assert a.lookup("4x4", 140e9, 30.0).ff_delay == 0.0
    with pytest.raises(KeyError):
        a.lookup("4x4", 1e9, 30.0)


def test_sweep_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig(trials=0)
    with pytest.raises(ConfigError):
        SweepConfig(arrays=())


def test_sweep_lsp_override():
    base = ScenarioConfig(**SWEEP_PRESET)
    res = nf_probability_sweep(base, SMALL, seed=1, lsp=lambda f, d: {"num_clusters": 4})
    assert all(row.scatterers == 3 * 3 for row in res.rows)


def test_cf_ff_identical_is_zero():
    real = realize(draw(ScenarioConfig(num_clusters=5), make_rng(0)))
    comp = cf_ff_compare(real, real)
    assert not comp.phase_diff.any() and not comp.gain_diff_db.any()
    assert cf_ff_runs(ScenarioConfig(num_clusters=5), [0, 1], Mode.FORCE_FF).summary()["max_abs_phase"] == 0.0


def test_cf_ff_ranges_and_structure():
    cfg = ScenarioConfig(num_clusters=8, d2d=20.0, carrier_frequency=140e9, **SWEEP_PRESET)
    comp = cf_ff_runs(cfg, range(3))
    assert np.all(np.abs(comp.phase_diff) < 2 * np.pi)
    assert comp.summary()["rays"] == comp.phase_diff.size
    a = realize(draw(cfg, make_rng(0)))
    b = realize(draw(ScenarioConfig(num_clusters=3), make_rng(0)))
    with pytest.raises(ConsistencyError):
        cf_ff_compare(a, b)
    with pytest.raises(ConfigError):
        cf_ff_runs(cfg, [])
