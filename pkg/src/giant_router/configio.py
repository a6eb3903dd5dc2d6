"""JSON router descriptions.

A document looks like::

    {
      "rabi": 1.0,
      "detuning": 0.0,
      "input": {"coupling": 1.0, "hopping": 1.0, "site": 3},
      "outputs": [{"coupling": 1.0}]
    }

``hopping`` defaults to 1 and ``detuning`` to the top-level default (itself
0). A waveguide may name its ``transition``; the input defaults to
``via_f`` and outputs to ``via_e``. Unknown keys are rejected.
"""
from __future__ import annotations

import hashlib
import json

from .core import RouterConfig, Transition, WaveguideSpec
from .errors import ConfigError

__all__ = ["ConfigParseError", "parse_config", "load_config", "config_to_dict", "dump_config", "config_hash"]

_TOP_KEYS = {"rabi", "detuning", "input", "outputs"}
_WG_KEYS = {"coupling", "hopping", "detuning", "site", "transition"}


class ConfigParseError(ConfigError):
    """Malformed config text; ``line``/``column`` are set for JSON syntax errors."""

    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigParseError(f"{path} must be a number, got {value!r}")
    return float(value)


def _waveguide(doc, path, default_detuning, default_transition):
    if not isinstance(doc, dict):
        raise ConfigParseError(f"{path} must be an object")
    unknown = set(doc) - _WG_KEYS
    if unknown:
        raise ConfigParseError(f"{path}: unknown key(s) {sorted(unknown)}")
    if "coupling" not in doc:
        raise ConfigParseError(f"{path}.coupling is required")
    site = doc.get("site", 1)
    if isinstance(site, bool) or not isinstance(site, int):
        raise ConfigParseError(f"{path}.site must be an integer, got {site!r}")
    return WaveguideSpec(
        coupling=_number(doc["coupling"], f"{path}.coupling"),
        hopping=_number(doc.get("hopping", 1.0), f"{path}.hopping"),
        detuning=_number(doc.get("detuning", default_detuning), f"{path}.detuning"),
        coupling_site=site,
        transition=doc.get("transition", default_transition.value),
    )


def parse_config(doc: dict) -> RouterConfig:
    """Build a :class:`RouterConfig` from an already-decoded JSON object."""
    if not isinstance(doc, dict):
        raise ConfigParseError("config must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigParseError(f"unknown top-level key(s) {sorted(unknown)}")
    for key in ("rabi", "input", "outputs"):
        if key not in doc:
            raise ConfigParseError(f"missing required key {key!r}")
    default_detuning = _number(doc.get("detuning", 0.0), "detuning")
    outputs = doc["outputs"]
    if not isinstance(outputs, list):
        raise ConfigParseError("outputs must be a list")
    return RouterConfig(
        rabi=_number(doc["rabi"], "rabi"),
        input=_waveguide(doc["input"], "input", default_detuning, Transition.VIA_F),
        outputs=tuple(
            _waveguide(o, f"outputs[{i}]", default_detuning, Transition.VIA_E)
            for i, o in enumerate(outputs)
        ),
    )


def load_config(path) -> RouterConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None
    return parse_config(doc)


def _wg_dict(w: WaveguideSpec):
    return {
        "coupling": w.coupling,
        "hopping": w.hopping,
        "detuning": w.detuning,
        "site": w.coupling_site,
        "transition": w.transition.value,
    }


def config_to_dict(cfg: RouterConfig) -> dict:
    return {
        "rabi": cfg.rabi,
        "input": _wg_dict(cfg.input),
        "outputs": [_wg_dict(w) for w in cfg.outputs],
    }


def dump_config(cfg: RouterConfig, indent=2) -> str:
    # json writes floats with repr(), which round-trips exactly.
    return json.dumps(config_to_dict(cfg), indent=indent)


def config_hash(cfg: RouterConfig) -> str:
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
