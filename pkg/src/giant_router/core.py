"""Domain types, band dispersion and effective potentials.

All energies, couplings and frequencies are measured in units of the
waveguide hopping. A waveguide attaches to the atom either through the
``|g> <-> |f>`` transition (the single input waveguide) or through
``|g> <-> |e>`` (every output waveguide); the classical drive ``Omega``
couples ``|f>`` and ``|e>``.
"""
from __future__ import annotations

import cmath
import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BandEdgeError, ConfigError, SingularPotentialError

__all__ = [
    "K_EDGE_MARGIN",
    "Transition",
    "LabFrameParams",
    "WaveguideSpec",
    "RouterConfig",
    "ModeCoordinate",
    "Wavenumber",
    "EffectivePotentials",
    "PhaseFactors",
    "check_wavenumber",
    "reduce_to_rotating_frame",
    "dispersion_energy",
    "wavenumber_from_energy",
    "group_velocity",
    "effective_potentials",
    "phase_factors",
]

#: Closest admissible distance of a wavenumber from the band edges 0 and pi.
K_EDGE_MARGIN = 1e-6


class Transition(str, enum.Enum):
    """Atomic transition through which a waveguide couples to the atom."""

    VIA_F = "via_f"
    VIA_E = "via_e"


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class LabFrameParams:
    """Lab-frame frequencies of the atom, the drive and the cavities.

    ``omega_input`` is the cavity frequency of the waveguide attached via
    ``|f>``; ``omega_outputs`` lists the cavity frequencies of the waveguides
    attached via ``|e>``. The drive is resonant, so ``nu`` is fixed to
    ``omega_e - omega_f``; passing a different value is an error.
    """

    omega_f: float
    omega_e: float
    omega_input: float
    omega_outputs: tuple[float, ...]
    nu: float | None = None

    def __post_init__(self):
        outputs = tuple(_finite("omega_outputs", w) for w in self.omega_outputs)
        if not outputs:
            raise ConfigError("at least one output cavity frequency is required")
        object.__setattr__(self, "omega_outputs", outputs)
        resonant = self.omega_e - self.omega_f
        if self.nu is not None and not math.isclose(self.nu, resonant, rel_tol=1e-12, abs_tol=1e-12):
            raise ConfigError(
                f"drive frequency nu={self.nu!r} is not resonant with omega_e - omega_f={resonant!r}"
            )
        object.__setattr__(self, "nu", resonant)


@dataclass(frozen=True)
class WaveguideSpec:
    """One semi-infinite coupled-resonator waveguide and its atom coupling.

    Parameters
    ----------
    coupling : float
        Atom-cavity coupling strength ``g >= 0``.
    hopping : float
        Nearest-neighbour hopping ``xi > 0``.
    detuning : float
        Cavity frequency minus the relevant atomic transition frequency.
    coupling_site : int
        Index ``l >= 1`` of the cavity the atom couples to; site 1 is the
        cavity next to the hard wall.
    transition : Transition
        ``VIA_F`` for the input waveguide, ``VIA_E`` for outputs.
    """

    coupling: float
    hopping: float = 1.0
    detuning: float = 0.0
    coupling_site: int = 1
    transition: Transition = Transition.VIA_E

    def __post_init__(self):
        coupling = _finite("coupling", self.coupling)
        hopping = _finite("hopping", self.hopping)
        detuning = _finite("detuning", self.detuning)
        if coupling < 0:
            raise ConfigError(f"coupling must be non-negative, got {coupling!r}")
        if hopping <= 0:
            raise ConfigError(f"hopping must be strictly positive, got {hopping!r}")
        site = self.coupling_site
        if isinstance(site, bool) or int(site) != site or site < 1:
            raise ConfigError(f"coupling_site must be an integer >= 1, got {site!r}")
        try:
            transition = Transition(self.transition)
        except ValueError:
            raise ConfigError(f"unknown transition {self.transition!r}") from None
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "hopping", hopping)
        object.__setattr__(self, "detuning", detuning)
        object.__setattr__(self, "coupling_site", int(site))
        object.__setattr__(self, "transition", transition)

    @property
    def band(self) -> tuple[float, float]:
        return (self.detuning - 2 * self.hopping, self.detuning + 2 * self.hopping)


@dataclass(frozen=True)
class RouterConfig:
    """A driven giant atom with one input and one or more output waveguides.

    The input couples through ``|g> <-> |f>`` and may sit at any site
    ``l >= 1``; outputs couple through ``|g> <-> |e>`` at site 1.
    """

    rabi: float
    input: WaveguideSpec
    outputs: tuple[WaveguideSpec, ...]

    def __post_init__(self):
        rabi = _finite("rabi", self.rabi)
        if rabi < 0:
            raise ConfigError(f"rabi must be non-negative, got {rabi!r}")
        object.__setattr__(self, "rabi", rabi)
        outputs = tuple(self.outputs)
        object.__setattr__(self, "outputs", outputs)
        if not outputs:
            raise ConfigError("total waveguide count must be at least 2 (one input, >= 1 output)")
        n_via_f = sum(w.transition is Transition.VIA_F for w in self.waveguides)
        if n_via_f != 1 or self.input.transition is not Transition.VIA_F:
            raise ConfigError(
                "exactly one waveguide (the input) may use the via_f transition; "
                f"found {n_via_f} via_f waveguide(s)"
            )
        for i, w in enumerate(outputs):
            if w.coupling_site != 1:
                raise ConfigError(
                    f"output {i + 1} couples at site {w.coupling_site}; only the input may be offset"
                )

    @property
    def waveguides(self) -> tuple[WaveguideSpec, ...]:
        return (self.input,) + self.outputs

    @property
    def input_site(self) -> int:
        return self.input.coupling_site

    @property
    def has_equal_bands(self) -> bool:
        """True when every waveguide shares the input's hopping and detuning."""
        return all(
            w.hopping == self.input.hopping and w.detuning == self.input.detuning
            for w in self.outputs
        )

    def with_input_site(self, site: int) -> "RouterConfig":
        return dataclasses.replace(self, input=dataclasses.replace(self.input, coupling_site=site))

    @classmethod
    def build(
        cls,
        rabi: float,
        g_in: float,
        g_out: float | Sequence[float],
        *,
        site: int = 1,
        hopping: float = 1.0,
        detuning: float = 0.0,
    ) -> "RouterConfig":
        """Shorthand for the common equal-band layout."""
        if np.ndim(g_out) == 0:
            g_out = [g_out]
        return cls(
            rabi=rabi,
            input=WaveguideSpec(g_in, hopping, detuning, site, Transition.VIA_F),
            outputs=tuple(WaveguideSpec(g, hopping, detuning) for g in g_out),
        )


def check_wavenumber(k):
    """Raise :class:`BandEdgeError` unless every ``k`` lies in the open band."""
    k = np.asarray(k, dtype=float)
    bad = ~((k >= K_EDGE_MARGIN) & (k <= math.pi - K_EDGE_MARGIN))
    if np.any(bad):
        first = float(k[bad].flat[0]) if k.ndim else float(k)
        raise BandEdgeError(
            f"k={first!r} is outside ({K_EDGE_MARGIN:g}, pi - {K_EDGE_MARGIN:g}); "
            "band edges have zero group velocity"
        )


def dispersion_energy(k, waveguide: WaveguideSpec):
    """Energy ``E = Delta - 2 xi cos(k)`` of a propagating mode.

    Accepts scalars or arrays. Wavenumbers on or within ``K_EDGE_MARGIN`` of
    the band edges raise :class:`BandEdgeError`.
    """
    check_wavenumber(k)
    e = waveguide.detuning - 2.0 * waveguide.hopping * np.cos(k)
    return float(e) if np.ndim(e) == 0 else e


def group_velocity(k, hopping=1.0):
    return 2.0 * hopping * np.sin(k)


@dataclass(frozen=True)
class ModeCoordinate:
    """A point ``(k, E)`` on the band of one waveguide."""

    k: float
    energy: float

    def __post_init__(self):
        check_wavenumber(self.k)
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "energy", float(self.energy))

    @classmethod
    def on(cls, k: float, waveguide: WaveguideSpec) -> "ModeCoordinate":
        return cls(k, dispersion_energy(k, waveguide))

    def check_on_band(self, waveguide: WaveguideSpec, tol: float = 1e-12):
        expected = waveguide.detuning - 2.0 * waveguide.hopping * math.cos(self.k)
        if abs(expected - self.energy) > tol * max(1.0, abs(expected)):
            raise ConfigError(
                f"energy {self.energy!r} is not on the band of the waveguide at k={self.k!r} "
                f"(expected {expected!r})"
            )


@dataclass(frozen=True)
class Wavenumber:
    """Solution ``k`` of the dispersion relation at a given energy.

    ``phase`` is ``exp(1j * k)``. For a propagating mode ``k`` is real in
    ``(0, pi)``; for an evanescent one ``k`` is complex and ``|phase| < 1``
    so the field decays away from the hard wall.
    """

    value: complex
    phase: complex
    propagating: bool

    @property
    def real(self) -> float:
        if not self.propagating:
            raise BandEdgeError("evanescent channel has no real wavenumber")
        return self.value.real


def wavenumber_from_energy(energy: float, waveguide: WaveguideSpec) -> Wavenumber:
    """Invert the dispersion relation, falling back to the decaying root."""
    c = (waveguide.detuning - energy) / waveguide.hopping  # = 2 cos(k)
    if abs(c) == 2.0:
        raise BandEdgeError(f"energy {energy!r} sits exactly on a band edge of the waveguide")
    if abs(c) < 2.0:
        k = math.acos(c / 2.0)
        return Wavenumber(complex(k), cmath.exp(1j * k), True)
    # z + 1/z = c; take the root inside the unit disk.
    z = 0.5 * (c - math.copysign(math.sqrt(c * c - 4.0), c))
    return Wavenumber(-1j * cmath.log(z), complex(z), False)


@dataclass(frozen=True)
class EffectivePotentials:
    """Energy-dependent potentials after eliminating the atom.

    ``v`` lists the local potentials, input first. ``g_input_output[i]``
    couples the input to output ``i``; ``g_output_output[(i, j)]`` couples
    outputs ``i < j``.
    """

    v: tuple[float, ...]
    g_input_output: tuple[float, ...]
    g_output_output: dict

    @property
    def v_input(self) -> float:
        return self.v[0]


def effective_potentials(energy: float, cfg: RouterConfig) -> EffectivePotentials:
    denom = energy * energy - cfg.rabi * cfg.rabi
    if denom == 0.0:
        raise SingularPotentialError(
            f"effective potentials diverge at E={energy!r} = +/-Omega={cfg.rabi!r}"
        )
    g_in = cfg.input.coupling
    g_out = [w.coupling for w in cfg.outputs]
    v = tuple(w.coupling**2 * energy / denom for w in cfg.waveguides)
    g_io = tuple(cfg.rabi * g_in * g / denom for g in g_out)
    g_oo = {
        (i, j): energy * g_out[i] * g_out[j] / denom
        for i in range(len(g_out))
        for j in range(i + 1, len(g_out))
    }
    return EffectivePotentials(v, g_io, g_oo)


@dataclass(frozen=True)
class PhaseFactors:
    n_factor: complex
    m_plus: complex
    m_minus: complex
    d_factor: float


def phase_factors(k, energy, rabi, hopping=1.0, site=1) -> PhaseFactors:
    """Phase factors ``N``, ``M+``, ``M-`` and the composite ``D``.

    ``N = exp(2ik) - 1``, ``M(+/-) = exp(+/-2ikl) - 1`` and
    ``D = (E**2 - Omega**2) xi**2``. Works elementwise on arrays.
    """
    k = np.asarray(k, dtype=float)
    n = np.exp(2j * k) - 1.0
    m_plus = np.exp(2j * k * site) - 1.0
    m_minus = np.exp(-2j * k * site) - 1.0
    d = (np.asarray(energy) ** 2 - rabi**2) * hopping**2
    if k.ndim == 0:
        return PhaseFactors(complex(n), complex(m_plus), complex(m_minus), float(d))
    return PhaseFactors(n, m_plus, m_minus, d)


def reduce_to_rotating_frame(lab: LabFrameParams) -> tuple[float, ...]:
    """Detunings in the frame rotating with the atomic transitions.

    Returns the input detuning ``omega_input - omega_f`` followed by
    ``omega_d - omega_e`` for each output.
    """
    return (lab.omega_input - lab.omega_f,) + tuple(w - lab.omega_e for w in lab.omega_outputs)
