"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -m acceptance -s``; the
summary table is also printed at the end of any session that runs it.
"""
import math
import time

import numpy as np
import pytest

from giant_router import analytic, oracle
from giant_router.core import ModeCoordinate, RouterConfig
from giant_router.figures import FIGURES
from giant_router.spectra import (
    DEFAULT_GRID,
    GridSpec,
    find_reflection_zeros,
    find_transfer_peaks,
    sweep,
)

from conftest import ACCEPTANCE_RESULTS, random_config, random_k

pytestmark = pytest.mark.acceptance

FINE_GRID = GridSpec(DEFAULT_GRID.k_min, DEFAULT_GRID.k_max, 10_000)
INNER_GRID = GridSpec(0.01 * math.pi, 0.99 * math.pi, 2001)
SEED = 7


def report(number, name, passed, detail):
    ACCEPTANCE_RESULTS.append((number, name, bool(passed), detail))
    print(f"{'PASS' if passed else 'FAIL'}  [{number:2d}] {name}: {detail}")
    assert passed, detail


def max_amp_dev(a, b):
    return max(
        [abs(a.reflection_amplitude - b.reflection_amplitude)]
        + [abs(x - y) for x, y in zip(a.transfer_amplitudes, b.transfer_amplitudes)]
    )


def test_c01_oracle_analytic_agreement():
    rng = np.random.default_rng(SEED)
    cases = [(random_config(rng), random_k(rng)) for _ in range(1000)]
    start = time.perf_counter()
    worst = 0.0
    for cfg, k in cases:
        a = analytic.amplitudes(ModeCoordinate.on(k, cfg.input), cfg)
        worst = max(worst, max_amp_dev(a, oracle.solve_point(k, cfg)))
    elapsed = time.perf_counter() - start
    report(
        1,
        "oracle vs closed forms, 1000 random configs",
        worst < 1e-9 and elapsed < 10.0,
        f"max |dev| = {worst:.2e} (< 1e-9), {elapsed:.2f} s (< 10 s)",
    )


def test_c02_flux_conservation():
    worst = {"analytic": 0.0, "oracle": 0.0}
    oracle_grid = GridSpec(DEFAULT_GRID.k_min, DEFAULT_GRID.k_max, 401)
    for panel in FIGURES.values():
        a = sweep(panel.config, DEFAULT_GRID, flux_tol=None)
        o = sweep(panel.config, oracle_grid, "oracle", flux_tol=None)
        worst["analytic"] = max(worst["analytic"], a.flux_residual.max())
        worst["oracle"] = max(worst["oracle"], o.flux_residual.max())
    rng = np.random.default_rng(SEED + 1)
    for _ in range(100):
        cfg = random_config(rng)
        grid = GridSpec(0.01 * math.pi, 0.99 * math.pi, 51)
        worst["analytic"] = max(worst["analytic"], sweep(cfg, grid, flux_tol=None).flux_residual.max())
        worst["oracle"] = max(worst["oracle"], sweep(cfg, grid, "oracle", flux_tol=None).flux_residual.max())
    report(
        2,
        "flux conservation, all panels and random configs",
        max(worst.values()) < 1e-10,
        f"analytic {worst['analytic']:.2e}, oracle {worst['oracle']:.2e} (< 1e-10)",
    )


def test_c03_perfect_transfer():
    spec = sweep(FIGURES["fig2d"].config, FINE_GRID)
    dev = float(np.abs(spec.transfer[:, 0] - 1).max())
    report(3, "perfect transfer at g_a=g_b=Omega=xi=1", dev < 1e-10, f"max |T-1| = {dev:.2e} on 1e4 points")


def test_c04_broadband_transfer():
    spec = sweep(FIGURES["fig2c"].config, FINE_GRID)
    window = np.abs(spec.energy) <= 1.5
    t_min = float(spec.transfer[window, 0].min())
    report(4, "broadband transfer at g=0.9", t_min > 0.9, f"min T = {t_min:.4f} over {window.sum()} points, |E| <= 1.5")


def test_c05_two_peaks():
    rep = find_transfer_peaks(sweep(FIGURES["fig2a"].config, FINE_GRID))
    heights = [p.height for p in rep.peaks]
    offsets = [abs(abs(p.energy) - 1) for p in rep.peaks]
    ok = rep.count == 2 and min(heights) > 1 - 1e-6 and max(offsets) < 0.35
    detail = f"{rep.count} peaks at E = {[round(p.energy, 5) for p in rep.peaks]}, min height 1-{1 - min(heights):.1e}"
    report(5, "two-peak structure at g=0.4", ok, detail)


def test_c06_reflection_zero_law():
    details, ok = [], True
    for site, count in ((3, 1), (5, 3), (6, 4)):
        rep = find_reflection_zeros(FIGURES["fig2d"].config, site)
        dk = max((m[3] for m in rep.matches), default=float("inf"))
        ok &= rep.ok and len(rep.matches) == count and len(rep.zeros) == count and dk < 1e-8
        details.append(f"l={site}: {len(rep.zeros)} zeros, max |dk| {dk:.1e}")
    report(6, "reflection zeros at k = n pi/(l-1)", ok, "; ".join(details))


def test_c07_undriven_reflects():
    cfg = FIGURES["fig8b"].config
    a = sweep(cfg, FINE_GRID)
    o = sweep(cfg, DEFAULT_GRID, "oracle")
    dev = max(float(np.abs(a.reflection - 1).max()), float(np.abs(o.reflection - 1).max()))
    report(7, "Omega=0 three-channel total reflection", dev < 1e-12, f"max |R-1| = {dev:.2e}")


def test_c08_single_channel_steering():
    details, ok = [], True
    for name, leak, main in (("fig8c", 1, 0), ("fig8d", 0, 1)):
        cfg = FIGURES[name].config
        full = sweep(cfg, FINE_GRID)
        inner = sweep(cfg, INNER_GRID)
        t_leak = float(full.transfer[:, leak].max())
        t_main = float(inner.transfer[:, main].min())
        ok &= t_leak < 1e-3 and t_main > 0.99
        details.append(f"{name}: max T_weak {t_leak:.2e}, min T_strong {t_main:.5f}")
    report(8, "single-channel steering", ok, "; ".join(details))


def test_c09_ratio_law():
    details, ok = [], True
    for g_b, g_c in ((0.5, 0.8), (0.2, 0.9)):
        cfg = RouterConfig.build(1.0, 1.0, [g_b, g_c])
        t = sweep(cfg, FINE_GRID).transfer
        lhs = np.abs(t[:, 0] * g_c**2 - t[:, 1] * g_b**2)
        worst = float((lhs / np.maximum(t[:, 0], t[:, 1])).max())
        ok &= worst <= 1e-12
        details.append(f"({g_b}, {g_c}): {worst:.1e}")
    report(9, "output ratio T_b/T_c = g_b^2/g_c^2", ok, "relative misfit " + ", ".join(details))


def test_c10_truncation_independence():
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(100):
        cfg = random_config(rng)
        for k in (random_k(rng) for _ in range(3)):
            worst = max(worst, max_amp_dev(oracle.solve_point(k, cfg, 20), oracle.solve_point(k, cfg, 200)))
    report(10, "oracle J=20 vs J=200", worst < 1e-12, f"max |dev| = {worst:.2e} over 300 points")


def test_c11_reduction_chain():
    rng = np.random.default_rng(SEED + 3)
    ks = INNER_GRID.points()[::20]
    energy = -2 * np.cos(ks)
    worst_three = worst_offset = 0.0
    for _ in range(100):
        g_a, g_b, rabi = rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), rng.uniform(0.0, 2.0)
        r2, t2, _ = analytic.two_channel_kernel(ks, energy, g_a, g_b, rabi)
        r3, tb, tc, _ = analytic.three_channel_kernel(ks, energy, g_a, g_b, 0.0, rabi)
        r1, t1, _ = analytic.offset_coupling_kernel(ks, energy, g_a, g_b, rabi, site=1)
        worst_three = max(worst_three, np.abs(r3 - r2).max(), np.abs(tb - t2).max(), np.abs(tc).max())
        worst_offset = max(worst_offset, np.abs(r1 - r2).max(), np.abs(t1 - t2).max())
    report(
        11,
        "reduction chain",
        max(worst_three, worst_offset) < 1e-12,
        f"three(g_c=0) vs two {worst_three:.2e}, offset(l=1) vs two {worst_offset:.2e}",
    )


def test_c12_band_symmetry():
    rng = np.random.default_rng(SEED + 4)
    ks = INNER_GRID.points()
    worst = 0.0
    for i in range(100):
        n_out = 1 if i % 2 == 0 else 2
        cfg = RouterConfig.build(
            rng.uniform(0.0, 2.0), rng.uniform(0.1, 2.0), list(rng.uniform(0.1, 2.0, n_out))
        )
        t = sweep(cfg, ks).transfer
        worst = max(worst, float(np.abs(t - t[::-1]).max()))
    report(12, "band symmetry T(k) = T(pi - k)", worst < 1e-12, f"max |dT| = {worst:.2e}")
