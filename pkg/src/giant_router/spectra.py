"""Rate spectra over the band and their features.

Grids are uniform in ``k``; energies are carried alongside for plotting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import analytic, oracle
from .core import K_EDGE_MARGIN, RouterConfig, check_wavenumber
from .errors import ConfigError, FluxViolationError

__all__ = [
    "GridSpec",
    "DEFAULT_GRID",
    "FLUX_TOL",
    "RateSpectrum",
    "Peak",
    "ReflectionZero",
    "PeakReport",
    "ZeroReport",
    "BandEdgeProfile",
    "sweep",
    "find_transfer_peaks",
    "find_reflection_zeros",
    "band_edge_profile",
    "is_perfect_transfer_point",
]

FLUX_TOL = 1e-10
METHODS = ("analytic", "oracle")


@dataclass(frozen=True)
class GridSpec:
    """``count`` points uniformly spaced in ``k`` over ``[k_min, k_max]``."""

    k_min: float
    k_max: float
    count: int
    spacing: str = "uniform-k"

    def __post_init__(self):
        if self.count < 1 or int(self.count) != self.count:
            raise ConfigError(f"grid needs a positive integer point count, got {self.count!r}")
        if self.count > 1 and not self.k_min < self.k_max:
            raise ConfigError(f"grid must be increasing, got k_min={self.k_min!r} >= k_max={self.k_max!r}")
        check_wavenumber([self.k_min, self.k_max])

    def points(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.k_min)])
        return np.linspace(self.k_min, self.k_max, int(self.count))


DEFAULT_GRID = GridSpec(1e-3 * math.pi, (1 - 1e-3) * math.pi, 2001)


@dataclass(frozen=True, eq=False)
class RateSpectrum:
    """Reflection and transfer rates sampled on a ``k`` grid.

    ``transfer`` has one column per output waveguide. The complex
    amplitudes are kept so that two spectra can be compared directly.
    """

    config: RouterConfig
    method: str
    k: np.ndarray
    energy: np.ndarray
    reflection: np.ndarray
    transfer: np.ndarray
    flux_residual: np.ndarray
    reflection_amplitude: np.ndarray
    transfer_amplitude: np.ndarray
    grid: GridSpec | None = None

    def __len__(self):
        return len(self.k)

    @property
    def n_outputs(self) -> int:
        return self.transfer.shape[1]

    @property
    def columns(self) -> list[str]:
        return ["k", "E", "R"] + [f"T_{i + 1}" for i in range(self.n_outputs)] + ["flux_residual"]

    def table(self) -> np.ndarray:
        """Real ``(n, 4 + n_outputs)`` array in the order of :attr:`columns`."""
        return np.column_stack(
            [self.k, self.energy, self.reflection, self.transfer, self.flux_residual]
        )

    def rows(self):
        return [tuple(float(v) for v in row) for row in self.table()]


def _as_points(grid):
    if isinstance(grid, GridSpec):
        return grid.points(), grid
    ks = np.atleast_1d(np.asarray(grid, dtype=float))
    if ks.size > 1 and np.any(np.diff(ks) <= 0):
        raise ConfigError("k grid must be strictly increasing")
    return ks, None


def sweep(
    cfg: RouterConfig,
    grid: GridSpec | Sequence[float] = DEFAULT_GRID,
    method: str = "analytic",
    *,
    truncation: int = oracle.DEFAULT_TRUNCATION,
    workers: int | None = None,
    flux_tol: float | None = FLUX_TOL,
) -> RateSpectrum:
    """Evaluate rates at every grid point with the chosen method.

    Rows are independent; with ``method="oracle"`` they may be spread over
    ``workers`` threads without changing the result. Any row whose flux
    residual exceeds ``flux_tol`` aborts the sweep (pass ``None`` to skip
    the check).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    ks, spec = _as_points(grid)
    check_wavenumber(ks)
    if method == "analytic":
        energy, r, t, _ = analytic.evaluate_grid(ks, cfg)
        big_r = np.abs(r) ** 2
        big_t = np.abs(t) ** 2
        flux = np.abs(big_r + big_t.sum(axis=1) - 1.0)
    else:
        sols = oracle.solve_grid(ks, cfg, truncation, workers)
        energy = np.array([s.energy for s in sols])
        r = np.array([s.reflection_amplitude for s in sols])
        t = np.array([s.transfer_amplitudes for s in sols]).reshape(len(ks), -1)
        big_r = np.array([s.reflection_rate for s in sols])
        big_t = np.array([s.transfer_rates for s in sols]).reshape(len(ks), -1)
        flux = np.array([s.flux_residual for s in sols])
    if flux_tol is not None and flux.size and flux.max() > flux_tol:
        i = int(flux.argmax())
        raise FluxViolationError(
            f"flux residual {flux[i]:.3e} > {flux_tol:g} at grid point {i} (k={ks[i]!r}, method={method})"
        )
    return RateSpectrum(cfg, method, ks, np.asarray(energy, dtype=float), big_r, big_t, flux, r, t, spec)


# -- peaks -------------------------------------------------------------------


@dataclass(frozen=True)
class Peak:
    k: float
    energy: float
    height: float
    width_k: float | None
    index: int


@dataclass(frozen=True)
class ReflectionZero:
    k: float
    energy: float
    reflection_rate: float


@dataclass
class PeakReport:
    peaks: tuple[Peak, ...] = ()
    zeros: tuple[ReflectionZero, ...] = ()

    @property
    def count(self) -> int:
        return len(self.peaks)


def _half_max_crossing(k, y, start, half, step):
    i = start
    while 0 <= i + step < len(y):
        j = i + step
        if y[j] < half:
            # Linear interpolation between i (above) and j (below).
            return k[i] + (half - y[i]) * (k[j] - k[i]) / (y[j] - y[i])
        i = j
    return None


def find_transfer_peaks(spec: RateSpectrum, channel: int = 0) -> PeakReport:
    """Local maxima of the transfer rate into output ``channel``.

    Each strict local maximum of the samples is refined by the vertex of the
    parabola through it and its two neighbours. A spectrum flat to 1e-12
    has no peaks.
    """
    y = spec.transfer[:, channel]
    k = spec.k
    if len(y) < 3:
        raise ValueError("peak search needs at least 3 grid points")
    if y.max() - y.min() < 1e-12:
        return PeakReport()
    xi, delta = spec.config.input.hopping, spec.config.input.detuning
    idx = np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]))[0] + 1
    peaks = []
    for i in idx:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        h = k[i + 1] - k[i]
        curv = y0 - 2 * y1 + y2
        shift = 0.5 * (y0 - y2) / curv if curv != 0 else 0.0
        k_peak = k[i] + shift * h
        height = y1 - 0.25 * (y0 - y2) * shift
        half = 0.5 * height
        left = _half_max_crossing(k, y, i, half, -1)
        right = _half_max_crossing(k, y, i, half, +1)
        width = float(right - left) if left is not None and right is not None else None
        peaks.append(
            Peak(float(k_peak), float(delta - 2 * xi * math.cos(k_peak)), float(height), width, int(i))
        )
    return PeakReport(peaks=tuple(peaks))


# -- reflection zeros ----------------------------------------------------------


def is_perfect_transfer_point(cfg: RouterConfig, rtol: float = 1e-12) -> bool:
    """True for two waveguides with ``g_a == g_b == Omega == xi``."""
    if len(cfg.outputs) != 1 or not cfg.has_equal_bands:
        return False
    xi = cfg.input.hopping
    return all(
        math.isclose(v, xi, rel_tol=rtol)
        for v in (cfg.input.coupling, cfg.outputs[0].coupling, cfg.rabi)
    )


def _reflection_fn(cfg, method, truncation):
    if method == "analytic":
        def rate(k):
            _, r, _, _ = analytic.evaluate_grid(k, cfg)
            return float(abs(r[0]) ** 2)
    else:
        def rate(k):
            return oracle.solve_point(k, cfg, truncation).reflection_rate
    return rate


def _refine_minimum(rate, lo, hi, xtol=1e-12, h=1e-7):
    """Bisect on the sign of dR/dk inside ``[lo, hi]``.

    ``R = |r|**2`` touches zero without changing sign, so the bracket is on
    its slope. Returns ``None`` if the slope does not change sign.
    """

    def slope(k):
        return rate(k + h) - rate(k - h)

    s_lo, s_hi = slope(lo), slope(hi)
    if s_lo > 0 or s_hi < 0:
        return None
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if slope(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class ZeroReport:
    """Refined reflection zeros paired with the phase-law prediction."""

    site: int
    prediction: analytic.PhasePrediction
    zeros: tuple[ReflectionZero, ...]
    matches: list = field(default_factory=list)  # (n, k_predicted, k_found, |dk|)
    unmatched_predicted: list = field(default_factory=list)  # (n, k_predicted)
    unmatched_found: list = field(default_factory=list)  # ReflectionZero
    global_perfect_transfer: bool = False
    max_reflection: float = float("nan")

    @property
    def ok(self) -> bool:
        return not self.unmatched_predicted and not self.unmatched_found


def find_reflection_zeros(
    cfg: RouterConfig,
    l: int | None = None,
    grid: GridSpec | Sequence[float] = DEFAULT_GRID,
    method: str = "analytic",
    *,
    match_tol: float = 1e-8,
    zero_tol: float = 1e-8,
    truncation: int = oracle.DEFAULT_TRUNCATION,
) -> ZeroReport:
    """Locate the zeros of ``R(k)`` and pair them with ``k = n pi / (l - 1)``.

    ``cfg`` must sit at the perfect-transfer point ``g_a = g_b = Omega = xi``;
    ``l`` overrides the input coupling site. Candidates are the sampled
    local minima of ``R``; each is refined to ``|dk| < 1e-12`` and kept only
    if ``R < zero_tol`` there. When ``R`` vanishes over the whole grid the
    report is flagged as global perfect transfer and no zeros are listed.
    """
    if l is not None:
        cfg = cfg.with_input_site(l)
    if not is_perfect_transfer_point(cfg):
        raise ConfigError("reflection-zero search needs two waveguides with g_a = g_b = Omega = xi")
    site = cfg.input_site
    pred = analytic.phase_prediction(site)
    spec = sweep(cfg, grid, method, truncation=truncation)
    big_r = spec.reflection
    ks = spec.k
    report = ZeroReport(site, pred, (), max_reflection=float(big_r.max()))
    if big_r.max() < 1e-10:
        report.global_perfect_transfer = True
    else:
        rate = _reflection_fn(cfg, method, truncation)
        zeros = []
        cand = np.nonzero((big_r[1:-1] <= big_r[:-2]) & (big_r[1:-1] < big_r[2:]))[0] + 1
        for i in cand:
            k0 = _refine_minimum(rate, ks[i - 1], ks[i + 1])
            if k0 is None:
                continue
            r0 = rate(k0)
            if r0 < zero_tol:
                xi, delta = cfg.input.hopping, cfg.input.detuning
                zeros.append(ReflectionZero(k0, delta - 2 * xi * math.cos(k0), r0))
        report.zeros = tuple(zeros)

    remaining = list(report.zeros)
    lo, hi = ks[0], ks[-1]
    for n, kp in zip(pred.orders, pred.perfect_transfer_wavenumbers):
        if not lo <= kp <= hi:
            continue
        best = min(remaining, key=lambda z: abs(z.k - kp), default=None)
        if best is not None and abs(best.k - kp) < match_tol:
            report.matches.append((n, kp, best.k, abs(best.k - kp)))
            remaining.remove(best)
        else:
            report.unmatched_predicted.append((n, kp))
    report.unmatched_found = remaining
    return report


# -- band edges ----------------------------------------------------------------


@dataclass
class BandEdgeProfile:
    """Dense spectrum next to one band edge and the width of its R drop."""

    spectrum: RateSpectrum
    edge: str
    transition_width: float | None
    k_high_reflection: float | None
    k_low_reflection: float | None


def band_edge_profile(
    cfg: RouterConfig,
    edge: str,
    span: float = 2 * math.pi * 1e-4,
    samples: int = 101,
    method: str = "analytic",
    **sweep_kwargs,
) -> BandEdgeProfile:
    """Sample ``samples`` uniformly spaced points within ``span`` of an edge.

    The sample that would land on the edge itself is moved to the closest
    admissible wavenumber, ``K_EDGE_MARGIN`` away. The transition width is
    the distance, walking inward from the edge, between the last point with
    ``R > 0.99`` and the first point with ``R < 0.01``; it is ``None`` when
    no such drop occurs.
    """
    if edge not in ("lower", "upper"):
        raise ValueError(f"edge must be 'lower' or 'upper', got {edge!r}")
    if span < 10 * K_EDGE_MARGIN:
        raise ValueError(f"span {span!r} is below 10 * {K_EDGE_MARGIN:g}")
    if samples < 3:
        raise ValueError("band-edge profile needs at least 3 samples")
    offsets = np.linspace(0.0, span, int(samples))
    if offsets[1] <= K_EDGE_MARGIN:
        raise ValueError("sampling interval must exceed the band-edge margin")
    offsets[0] = K_EDGE_MARGIN
    ks = offsets if edge == "lower" else (math.pi - offsets)[::-1]
    spec = sweep(cfg, ks, method, **sweep_kwargs)

    inward = spec.reflection if edge == "lower" else spec.reflection[::-1]
    k_in = spec.k if edge == "lower" else spec.k[::-1]
    below = np.nonzero(inward < 0.01)[0]
    width = k_hi = k_lo = None
    if below.size:
        i_lo = int(below[0])
        above = np.nonzero(inward[:i_lo] > 0.99)[0]
        if above.size:
            i_hi = int(above[-1])
            k_hi, k_lo = float(k_in[i_hi]), float(k_in[i_lo])
            width = abs(k_lo - k_hi)
    return BandEdgeProfile(spec, edge, width, k_hi, k_lo)
