import math

import numpy as np
import pytest

from giant_router.core import RouterConfig, WaveguideSpec
from giant_router.errors import AnalyticAssumptionError, BandEdgeError, ConfigError
from giant_router.figures import FIGURES
from giant_router.spectra import (
    DEFAULT_GRID,
    GridSpec,
    band_edge_profile,
    find_reflection_zeros,
    find_transfer_peaks,
    is_perfect_transfer_point,
    sweep,
)


def test_grid_spec():
    g = GridSpec(0.1, 0.5, 5)
    np.testing.assert_allclose(g.points(), [0.1, 0.2, 0.3, 0.4, 0.5])
    assert DEFAULT_GRID.points()[0] == pytest.approx(1e-3 * math.pi)
    assert GridSpec(1.0, 1.0, 1).points().tolist() == [1.0]


@pytest.mark.parametrize(
    "args, exc",
    [
        ((0.0, 1.0, 10), BandEdgeError),
        ((0.1, math.pi, 10), BandEdgeError),
        ((1.0, 0.5, 10), ConfigError),
        ((0.1, 1.0, 0), ConfigError),
    ],
)
def test_grid_spec_rejects(args, exc):
    with pytest.raises(exc):
        GridSpec(*args)


def test_sweep_fig2d_is_flat():
    spec = sweep(FIGURES["fig2d"].config)
    assert spec.columns == ["k", "E", "R", "T_1", "flux_residual"]
    assert spec.table().shape == (2001, 5)
    np.testing.assert_allclose(spec.transfer[:, 0], 1.0, atol=1e-12)
    assert spec.flux_residual.max() < 1e-12


def test_sweep_three_channel_columns():
    spec = sweep(FIGURES["fig9a"].config, GridSpec(0.1, 3.0, 11))
    assert spec.columns[-3:] == ["T_1", "T_2", "flux_residual"]
    assert spec.n_outputs == 2
    assert len(spec.rows()) == 11


def test_sweep_methods_agree():
    grid = GridSpec(0.02, 3.1, 301)
    for name in ("fig2b", "fig4c", "fig8a"):
        cfg = FIGURES[name].config
        a, o = sweep(cfg, grid), sweep(cfg, grid, "oracle", workers=4)
        np.testing.assert_allclose(a.reflection, o.reflection, atol=1e-9)
        np.testing.assert_allclose(a.transfer, o.transfer, atol=1e-9)


def test_sweep_deterministic():
    cfg = FIGURES["fig8a"].config
    grid = GridSpec(0.02, 3.1, 101)
    a = sweep(cfg, grid, "oracle")
    b = sweep(cfg, grid, "oracle", workers=3)
    assert np.array_equal(a.table(), b.table())
    assert np.array_equal(sweep(cfg, grid).table(), sweep(cfg, grid).table())


def test_sweep_band_symmetry():
    spec = sweep(FIGURES["fig2b"].config, GridSpec(0.01 * math.pi, 0.99 * math.pi, 999))
    np.testing.assert_allclose(spec.transfer[:, 0], spec.transfer[::-1, 0], atol=1e-12)


def test_sweep_rejects():
    cfg = FIGURES["fig2b"].config
    with pytest.raises(ValueError):
        sweep(cfg, method="magic")
    with pytest.raises(ConfigError):
        sweep(cfg, [0.5, 0.4])
    with pytest.raises(BandEdgeError):
        sweep(cfg, [0.0, 0.4])
    unequal = RouterConfig(1.0, WaveguideSpec(1.0, transition="via_f"), (WaveguideSpec(1.0, hopping=0.5),))
    with pytest.raises(AnalyticAssumptionError):
        sweep(unequal)
    assert sweep(unequal, GridSpec(0.1, 0.5, 5), "oracle").flux_residual.max() < 1e-10


def test_fig2a_two_peaks():
    spec = sweep(FIGURES["fig2a"].config, GridSpec(1e-3 * math.pi, (1 - 1e-3) * math.pi, 10_000))
    rep = find_transfer_peaks(spec)
    assert rep.count == 2
    lo, hi = sorted(rep.peaks, key=lambda p: p.energy)
    assert lo.energy == pytest.approx(-hi.energy, abs=1e-6)
    assert abs(abs(hi.energy) - 1.077) < 1e-3
    for p in rep.peaks:
        assert p.height > 1 - 1e-6
        assert 0.1 < p.width_k < 0.3


@pytest.mark.parametrize("cfg", [FIGURES["fig2d"].config, RouterConfig.build(0.0, 1.0, 1.0)])
def test_flat_spectra_have_no_peaks(cfg):
    assert find_transfer_peaks(sweep(cfg)).count == 0


def test_peak_search_needs_three_points():
    with pytest.raises(ValueError):
        find_transfer_peaks(sweep(FIGURES["fig2a"].config, [0.5, 0.6]))


def test_perfect_transfer_point():
    assert is_perfect_transfer_point(FIGURES["fig2d"].config)
    assert is_perfect_transfer_point(FIGURES["fig4c"].config)
    assert not is_perfect_transfer_point(FIGURES["fig2b"].config)
    assert not is_perfect_transfer_point(FIGURES["fig9a"].config)


@pytest.mark.parametrize("method", ["analytic", "oracle"])
@pytest.mark.parametrize("site, count", [(3, 1), (5, 3), (6, 4)])
def test_reflection_zeros(site, count, method):
    grid = DEFAULT_GRID if method == "analytic" else GridSpec(1e-3 * math.pi, (1 - 1e-3) * math.pi, 401)
    rep = find_reflection_zeros(FIGURES["fig2d"].config, site, grid, method)
    assert rep.ok
    assert len(rep.matches) == count
    assert len(rep.zeros) == count
    for n, kp, kf, dk in rep.matches:
        assert kp == pytest.approx(n * math.pi / (site - 1))
        assert dk < 1e-8


def test_reflection_zeros_site_one_is_global():
    rep = find_reflection_zeros(FIGURES["fig2d"].config)
    assert rep.global_perfect_transfer
    assert rep.zeros == ()
    assert rep.ok


def test_reflection_zeros_site_two_has_none():
    rep = find_reflection_zeros(FIGURES["fig2d"].config, 2)
    assert rep.zeros == () and rep.matches == [] and rep.ok
    assert not rep.global_perfect_transfer


def test_reflection_zeros_precondition():
    with pytest.raises(ConfigError):
        find_reflection_zeros(FIGURES["fig2b"].config, 3)


def test_band_edges_fig8c():
    cfg = FIGURES["fig8c"].config
    lower = band_edge_profile(cfg, "lower")
    upper = band_edge_profile(cfg, "upper")
    assert lower.spectrum.k[0] == pytest.approx(1e-6)
    assert upper.spectrum.k[-1] == pytest.approx(math.pi - 1e-6)
    assert len(lower.spectrum) == 101
    assert lower.spectrum.reflection[0] > 0.99
    assert lower.spectrum.reflection[-1] < 0.01
    # Mirror image across the band centre.
    np.testing.assert_allclose(lower.spectrum.reflection, upper.spectrum.reflection[::-1], atol=1e-9)
    assert lower.transition_width == pytest.approx(upper.transition_width, rel=1e-9)
    assert 0 < lower.transition_width < 2 * math.pi * 1e-4


def test_band_edge_perfect_transfer():
    prof = band_edge_profile(FIGURES["fig2d"].config, "lower")
    assert prof.spectrum.reflection.max() < 1e-10
    assert prof.transition_width is None


@pytest.mark.parametrize(
    "kwargs",
    [dict(edge="middle"), dict(edge="lower", span=1e-6), dict(edge="lower", samples=2)],
)
def test_band_edge_rejects(kwargs):
    with pytest.raises(ValueError):
        band_edge_profile(FIGURES["fig2d"].config, **kwargs)


def test_fig9b_ratio():
    spec = sweep(FIGURES["fig9b"].config, GridSpec(0.05, 3.09, 200))
    ratio = spec.transfer[:, 0] / spec.transfer[:, 1]
    np.testing.assert_allclose(ratio, 4 / 81, rtol=1e-12)
