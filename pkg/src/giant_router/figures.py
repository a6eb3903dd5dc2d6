"""Parameter tables for the published spectrum panels.

All values are in units of the hopping, with zero detuning throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import RouterConfig

__all__ = ["FigurePanel", "FIGURES", "INSET_SPAN", "INSET_SAMPLES", "figure_names"]

# Band-edge insets cover k in [0, 2 pi 1e-4] (and its mirror) at dk = 2 pi 1e-6.
INSET_SPAN = 2 * math.pi * 1e-4
INSET_SAMPLES = 101


@dataclass(frozen=True)
class FigurePanel:
    name: str
    config: RouterConfig
    description: str
    insets: bool = False


def _two(g_a, g_b, rabi=1.0, site=1):
    return RouterConfig.build(rabi, g_a, g_b, site=site)


def _three(g_a, g_b, g_c, rabi):
    return RouterConfig.build(rabi, g_a, [g_b, g_c])


_PANELS = [
    # Two waveguides, Omega = 1.
    FigurePanel("fig2a", _two(0.4, 0.4), "g_a=g_b=0.4, Omega=1"),
    FigurePanel("fig2b", _two(0.4, 0.6), "g_a=0.4, g_b=0.6, Omega=1"),
    FigurePanel("fig2c", _two(0.9, 0.9), "g_a=g_b=0.9, Omega=1"),
    FigurePanel("fig2d", _two(1.0, 1.0), "g_a=g_b=1, Omega=1"),
    # Input coupled at cavity l; g_a = g_b = Omega = 1.
    FigurePanel("fig4a", _two(1.0, 1.0, site=1), "l=1, g_a=g_b=Omega=1"),
    FigurePanel("fig4b", _two(1.0, 1.0, site=3), "l=3, g_a=g_b=Omega=1"),
    FigurePanel("fig4c", _two(1.0, 1.0, site=5), "l=5, g_a=g_b=Omega=1"),
    FigurePanel("fig4d", _two(1.0, 1.0, site=6), "l=6, g_a=g_b=Omega=1"),
    # Three waveguides; (b) keeps the couplings of (a) and switches the drive off.
    FigurePanel("fig8a", _three(0.5, 0.4, 0.6, 1.0), "g_a=0.5, g_b=0.4, g_c=0.6, Omega=1", True),
    FigurePanel("fig8b", _three(0.5, 0.4, 0.6, 0.0), "g_a=0.5, g_b=0.4, g_c=0.6, Omega=0", True),
    FigurePanel("fig8c", _three(1.0, 1.0, 0.01, 1.0), "g_a=g_b=Omega=1, g_c=0.01", True),
    FigurePanel("fig8d", _three(1.0, 0.01, 1.0, 1.0), "g_a=g_c=Omega=1, g_b=0.01", True),
    # Ratio control with g_a = Omega = 1.
    FigurePanel("fig9a", _three(1.0, 0.5, 0.8, 1.0), "g_b=0.5, g_c=0.8, g_a=Omega=1"),
    FigurePanel("fig9b", _three(1.0, 0.2, 0.9, 1.0), "g_b=0.2, g_c=0.9, g_a=Omega=1"),
]

FIGURES = {p.name: p for p in _PANELS}


def figure_names():
    return list(FIGURES)
