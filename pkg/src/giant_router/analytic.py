"""Closed-form single-photon scattering amplitudes.

Three layouts have closed forms, all for waveguides that share one hopping
``xi`` and one detuning (hence one wavenumber ``k``):

* two waveguides, both coupled at site 1;
* two waveguides with the input coupled at site ``l``;
* three waveguides (one input, two outputs), all coupled at site 1.

Every amplitude is evaluated as a polynomial ratio in ``exp(ik)`` with no
``E**2 - Omega**2`` division, so the points ``E = +/-Omega`` are regular.
The kernels (``*_kernel``) broadcast over arrays of ``k``; the public
functions wrap them for a single :class:`~giant_router.core.ModeCoordinate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ModeCoordinate, RouterConfig, check_wavenumber, phase_factors
from .errors import AnalyticAssumptionError

__all__ = [
    "ScatteringSolution",
    "PhasePrediction",
    "two_channel_kernel",
    "offset_coupling_kernel",
    "three_channel_kernel",
    "evaluate_grid",
    "two_channel_amplitudes",
    "offset_coupling_amplitudes",
    "three_channel_amplitudes",
    "amplitudes",
    "phase_prediction",
]


@dataclass(frozen=True)
class ScatteringSolution:
    """Amplitudes and rates for a photon incident on the input waveguide.

    ``transfer_amplitudes`` and ``transfer_rates`` follow the order of
    ``cfg.outputs``. ``boundary_amplitudes`` (input first, then outputs) are
    the standing-wave coefficients ``A`` with field ``A sin(k j)`` between
    the hard wall and the coupling site; for an output this is the site-1
    field divided by ``sin(k)``. ``atom_amplitudes`` is ``(U_f, U_e)`` and is
    only filled by the lattice solver.
    """

    k: float
    energy: float
    reflection_amplitude: complex
    transfer_amplitudes: tuple[complex, ...]
    boundary_amplitudes: tuple[complex, ...]
    reflection_rate: float
    transfer_rates: tuple[float, ...]
    flux_residual: float
    atom_amplitudes: tuple[complex, complex] | None = None
    propagating: tuple[bool, ...] = ()
    method: str = "analytic"

    @property
    def total_transfer(self) -> float:
        return float(sum(self.transfer_rates))


@dataclass(frozen=True)
class PhasePrediction:
    """Round-trip phase law for an input coupled at site ``l``.

    The reflected wave is the sum of the wave re-emitted at site ``l`` and
    the wave that travels to the hard wall and back; their phase difference
    is ``2 k (l - 1) + pi``. Reflection vanishes where that difference is an
    odd multiple of ``pi``, i.e. at ``k = n pi / (l - 1)``.
    """

    l: int
    perfect_transfer_wavenumbers: tuple[float, ...]
    orders: tuple[int, ...]

    def delta_phi(self, k):
        return 2.0 * np.asarray(k) * (self.l - 1) + math.pi


# -- kernels ---------------------------------------------------------------


def two_channel_kernel(k, energy, g_a, g_b, rabi, hopping=1.0):
    """Reflection and transfer amplitudes, input and output at site 1."""
    pf = phase_factors(k, energy, rabi, hopping)
    z = np.exp(1j * np.asarray(k, dtype=float))
    e_xi = energy * hopping
    ga2, gb2 = g_a * g_a, g_b * g_b
    den = z**3 * ga2 * gb2 + z**2 * (ga2 + gb2) * e_xi + z * pf.d_factor
    r = -(z * ga2 * gb2 + (ga2 + z**2 * gb2) * e_xi + z * pf.d_factor) / den
    t = pf.n_factor * g_a * g_b * rabi * hopping / den
    a_in = -2j * z * (pf.d_factor + e_xi * gb2 * z) / den
    return r, t, a_in


def offset_coupling_kernel(k, energy, g_a, g_b, rabi, site, hopping=1.0):
    """Two waveguides with the input coupled at ``site``.

    Returns ``(r, t, a_standing)`` where ``a_standing`` is the amplitude of
    the standing wave ``a_standing * sin(k j)`` for ``1 <= j <= site``.
    """
    pf = phase_factors(k, energy, rabi, hopping, site)
    z = np.exp(1j * np.asarray(k, dtype=float))
    e_xi = energy * hopping
    ga2, gb2 = g_a * g_a, g_b * g_b
    n, mp, mm, d = pf.n_factor, pf.m_plus, pf.m_minus, pf.d_factor
    den = z**2 * mp * ga2 * gb2 + z * (mp * ga2 + n * gb2) * e_xi + n * d
    r = (z**2 * mm * ga2 * gb2 + z * (mm * ga2 - n * gb2) * e_xi - n * d) / den
    t = np.exp(-1j * np.asarray(k) * site) * mp * n * g_a * g_b * rabi * hopping / den
    a_standing = -2j * n * (d + e_xi * gb2 * z) / den
    return r, t, a_standing


def three_channel_kernel(k, energy, g_a, g_b, g_c, rabi, hopping=1.0):
    """One input and two outputs, all coupled at site 1.

    The ``D`` term of the reflection numerator carries a ``+`` sign; with
    ``-`` the amplitudes neither conserve flux nor reduce to the
    two-waveguide result at ``g_c = 0``.
    """
    pf = phase_factors(k, energy, rabi, hopping)
    z = np.exp(1j * np.asarray(k, dtype=float))
    e_xi = energy * hopping
    ga2 = g_a * g_a
    s_out = g_b * g_b + g_c * g_c
    den = z**3 * ga2 * s_out + z**2 * (ga2 + s_out) * e_xi + z * pf.d_factor
    r = -(z * ga2 * s_out + (ga2 + z**2 * s_out) * e_xi + z * pf.d_factor) / den
    t_b = pf.n_factor * g_a * g_b * rabi * hopping / den
    t_c = pf.n_factor * g_a * g_c * rabi * hopping / den
    a_in = -2j * z * (pf.d_factor + e_xi * s_out * z) / den
    return r, t_b, t_c, a_in


# -- config checks -----------------------------------------------------------


def _require_equal_bands(cfg: RouterConfig):
    if not cfg.has_equal_bands:
        raise AnalyticAssumptionError(
            "closed forms require every waveguide to share the input's hopping and detuning; "
            "use the lattice solver for unequal bands"
        )


def _layout(cfg: RouterConfig) -> str:
    _require_equal_bands(cfg)
    n_out = len(cfg.outputs)
    if n_out == 1:
        return "two" if cfg.input_site == 1 else "offset"
    if n_out == 2:
        if cfg.input_site != 1:
            raise AnalyticAssumptionError("three-waveguide closed form needs every coupling at site 1")
        return "three"
    raise AnalyticAssumptionError(
        f"no closed form for {n_out + 1} waveguides; use the lattice solver"
    )


def evaluate_grid(k, cfg: RouterConfig):
    """Evaluate the matching closed form on an array of wavenumbers.

    Returns ``(energy, r, t, boundary)`` with ``t`` of shape ``(n, n_out)``
    and ``boundary`` of shape ``(n, n_out + 1)``.
    """
    layout = _layout(cfg)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    check_wavenumber(k)
    xi = cfg.input.hopping
    energy = cfg.input.detuning - 2.0 * xi * np.cos(k)
    g_a = cfg.input.coupling
    if layout == "three":
        g_b, g_c = (w.coupling for w in cfg.outputs)
        r, t_b, t_c, a_in = three_channel_kernel(k, energy, g_a, g_b, g_c, cfg.rabi, xi)
        t = np.stack([t_b, t_c], axis=-1)
    else:
        g_b = cfg.outputs[0].coupling
        if layout == "two":
            r, t1, a_in = two_channel_kernel(k, energy, g_a, g_b, cfg.rabi, xi)
        else:
            r, t1, a_in = offset_coupling_kernel(k, energy, g_a, g_b, cfg.rabi, cfg.input_site, xi)
        t = t1[:, None]
    b_out = t * (np.exp(1j * k) / np.sin(k))[:, None]
    boundary = np.concatenate([a_in[:, None], b_out], axis=-1)
    return energy, r, t, boundary


def _solution(mode, cfg):
    mode.check_on_band(cfg.input)
    _, r, t, boundary = evaluate_grid(mode.k, cfg)
    r = complex(r[0])
    t = tuple(complex(x) for x in t[0])
    big_r = abs(r) ** 2
    big_t = tuple(abs(x) ** 2 for x in t)
    return ScatteringSolution(
        k=mode.k,
        energy=mode.energy,
        reflection_amplitude=r,
        transfer_amplitudes=t,
        boundary_amplitudes=tuple(complex(x) for x in boundary[0]),
        reflection_rate=big_r,
        transfer_rates=big_t,
        flux_residual=abs(big_r + sum(big_t) - 1.0),
        propagating=(True,) * len(t),
        method="analytic",
    )


def two_channel_amplitudes(mode: ModeCoordinate, cfg: RouterConfig) -> ScatteringSolution:
    """Scattering off an atom joining two waveguides at their end cavities.

    Examples
    --------
    At ``g_a = g_b = Omega = xi`` every photon is transferred:

    >>> cfg = RouterConfig.build(rabi=1.0, g_in=1.0, g_out=1.0)
    >>> sol = two_channel_amplitudes(ModeCoordinate.on(math.pi / 2, cfg.input), cfg)
    >>> round(sol.transfer_rates[0], 12)
    1.0
    """
    if _layout(cfg) != "two":
        raise AnalyticAssumptionError("two_channel_amplitudes needs one output and the input at site 1")
    return _solution(mode, cfg)


def offset_coupling_amplitudes(
    mode: ModeCoordinate, cfg: RouterConfig, site: int | None = None
) -> ScatteringSolution:
    """Two-waveguide router with the input coupled at cavity ``site``.

    ``site`` overrides ``cfg.input.coupling_site`` when given. The input
    boundary amplitude is the coefficient of the standing wave that fills
    cavities ``1..site``.
    """
    if site is not None:
        cfg = cfg.with_input_site(site)
    _require_equal_bands(cfg)
    if len(cfg.outputs) != 1:
        raise AnalyticAssumptionError("offset_coupling_amplitudes needs exactly one output")
    return _solution(mode, cfg)


def three_channel_amplitudes(mode: ModeCoordinate, cfg: RouterConfig) -> ScatteringSolution:
    if _layout(cfg) != "three":
        raise AnalyticAssumptionError("three_channel_amplitudes needs exactly two outputs")
    return _solution(mode, cfg)


def amplitudes(mode: ModeCoordinate, cfg: RouterConfig) -> ScatteringSolution:
    """Dispatch to whichever closed form matches ``cfg``."""
    _layout(cfg)
    return _solution(mode, cfg)


def phase_prediction(l: int) -> PhasePrediction:
    """Wavenumbers ``n pi / (l - 1)`` inside ``(0, pi)`` where reflection vanishes.

    >>> phase_prediction(5).orders
    (1, 2, 3)
    >>> phase_prediction(1).perfect_transfer_wavenumbers
    ()
    """
    if isinstance(l, bool) or int(l) != l or l < 1:
        raise ValueError(f"coupling site must be an integer >= 1, got {l!r}")
    l = int(l)
    orders = tuple(range(1, l - 1)) if l > 2 else ()
    ks = tuple(n * math.pi / (l - 1) for n in orders)
    return PhasePrediction(l, ks, orders)
