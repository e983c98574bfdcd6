"""Run configuration schema: parsing, validation, and presets.

A run is described by a single YAML document.  Parsing fills every
default and records it, so the normalized document that comes back out
of :meth:`RunConfig.to_document` is the complete provenance record for
the run: parse, serialize, parse again is the identity.

Unknown keys are rejected everywhere.  Validation errors carry the
offending field path, e.g. ``masses: m must exceed 2*mu``.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
import yaml

from .counterexample import ModelParams
from .distributions import SpectralMeasure
from .errors import ConfigError
from .kinematics import Mass
from .stability import ModelCurrent, onshell_nonzero_current, onshell_vanishing_current
from .testfunctions import (
    SpatialEnvelope,
    WavePacket,
    constant_line,
    gaussian_line,
    odd_gaussian_line,
)

SCHEMA_VERSION = 1

MODES = ("stability", "counterexample", "both")
CURRENT_KINDS = ("onshell-nonzero", "onshell-vanishing")
TEMPORAL_KINDS = ("constant", "gaussian", "odd-gaussian")
OUTPUT_FORMATS = ("csv", "json")

DEFAULT_CURRENT_MASS = 4.0
DEFAULT_N_LADDER = (4, 16, 64, 256)
DEFAULT_MC_SAMPLES = 1_000_000
MIN_MC_SAMPLES = 10_000


def _require_mapping(value: Any, path: str) -> dict:
    if not isinstance(value, Mapping):
        raise ConfigError(path, f"expected a mapping, got {type(value).__name__}")
    return dict(value)


def _reject_unknown(doc: dict, path: str) -> None:
    if doc:
        keys = ", ".join(sorted(str(k) for k in doc))
        raise ConfigError(path, f"unknown keys: {keys}")


def _as_float(value: Any, path: str, *, positive: bool = False) -> float:
    # bool is an int subclass; YAML "true" must not pass as 1.0
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(path, f"must be finite, got {value!r}")
    if positive and out <= 0.0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    return out


def _as_int(value: Any, path: str, *, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {value}")
    return int(value)


def _as_str(value: Any, path: str, choices: tuple[str, ...] | None = None) -> str:
    if not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {value!r}")
    if choices is not None and value not in choices:
        raise ConfigError(path, f"must be one of {', '.join(choices)}; got {value!r}")
    return value


def _parse_masses(raw: Any, path: str) -> tuple[float, float]:
    doc = _require_mapping(raw, path)
    mu = _as_float(doc.pop("mu", 0.5), f"{path}.mu", positive=True)
    m = _as_float(doc.pop("m", 2.0), f"{path}.m", positive=True)
    _reject_unknown(doc, path)
    if m == mu:
        raise ConfigError(path, "m and mu must differ")
    return mu, m


def _parse_current_model(raw: Any, path: str) -> tuple[str, float]:
    if isinstance(raw, str):
        kind = _as_str(raw, path, CURRENT_KINDS)
        return kind, DEFAULT_CURRENT_MASS
    doc = _require_mapping(raw, path)
    kind = _as_str(doc.pop("kind", "onshell-nonzero"), f"{path}.kind", CURRENT_KINDS)
    mass = _as_float(doc.pop("mass", DEFAULT_CURRENT_MASS), f"{path}.mass", positive=True)
    _reject_unknown(doc, path)
    return kind, mass


def _default_rho(current_mass: float) -> dict:
    # unit-mass uniform density on a window around the current-model mass squared
    m2 = current_mass * current_mass
    lo, hi = 0.64 * m2, 1.44 * m2
    piece = {"interval": [lo, hi], "coeffs": [1.0 / (hi - lo)]}
    return {"atoms": [], "density": [piece], "signed": False}


def _parse_rho(raw: Any, path: str) -> dict:
    doc = _require_mapping(raw, path)
    atoms = doc.pop("atoms", [])
    density = doc.pop("density", [])
    signed = doc.pop("signed", False)
    _reject_unknown(doc, path)
    if not isinstance(signed, bool):
        raise ConfigError(f"{path}.signed", f"expected a boolean, got {signed!r}")
    if not isinstance(atoms, list):
        raise ConfigError(f"{path}.atoms", "expected a list of [s_squared, weight] pairs")
    norm_atoms = []
    for i, entry in enumerate(atoms):
        if not isinstance(entry, list) or len(entry) != 2:
            raise ConfigError(f"{path}.atoms[{i}]", "expected an [s_squared, weight] pair")
        s2 = _as_float(entry[0], f"{path}.atoms[{i}][0]", positive=True)
        w = _as_float(entry[1], f"{path}.atoms[{i}][1]")
        norm_atoms.append([s2, w])
    if not isinstance(density, list):
        raise ConfigError(f"{path}.density", "expected a list of density pieces")
    norm_density = []
    for i, entry in enumerate(density):
        piece = _require_mapping(entry, f"{path}.density[{i}]")
        interval = piece.pop("interval", None)
        coeffs = piece.pop("coeffs", None)
        _reject_unknown(piece, f"{path}.density[{i}]")
        if not isinstance(interval, list) or len(interval) != 2:
            raise ConfigError(f"{path}.density[{i}].interval", "expected [lower, upper]")
        lo = _as_float(interval[0], f"{path}.density[{i}].interval[0]")
        hi = _as_float(interval[1], f"{path}.density[{i}].interval[1]")
        if not 0.0 <= lo < hi:
            raise ConfigError(
                f"{path}.density[{i}].interval", f"need 0 <= lower < upper, got [{lo}, {hi}]"
            )
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError(f"{path}.density[{i}].coeffs", "expected a nonempty coefficient list")
        cs = [_as_float(c, f"{path}.density[{i}].coeffs[{j}]") for j, c in enumerate(coeffs)]
        norm_density.append({"interval": [lo, hi], "coeffs": cs})
    normalized = {"atoms": norm_atoms, "density": norm_density, "signed": signed}
    try:
        SpectralMeasure.from_dict(normalized)
    except ValueError as err:
        raise ConfigError(path, str(err)) from err
    return normalized


def _parse_n_ladder(raw: Any, path: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(path, "expected a nonempty list of integers")
    values = tuple(_as_int(v, f"{path}[{i}]", minimum=1) for i, v in enumerate(raw))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(path, "values must be strictly increasing")
    return values


def _parse_temporal(raw: Any, path: str) -> dict:
    doc = _require_mapping(raw, path)
    kind = _as_str(doc.pop("kind", "gaussian"), f"{path}.kind", TEMPORAL_KINDS)
    amplitude = _as_float(doc.pop("amplitude", 1.0), f"{path}.amplitude", positive=True)
    normalized = {"kind": kind, "amplitude": amplitude}
    if kind != "constant":
        normalized["width"] = _as_float(doc.pop("width", 1.0), f"{path}.width", positive=True)
    _reject_unknown(doc, path)
    return normalized


def _parse_spatial(raw: Any, path: str) -> dict:
    doc = _require_mapping(raw, path)
    center = doc.pop("center", [0.0, 0.0, 0.0])
    width = _as_float(doc.pop("width", 0.1), f"{path}.width", positive=True)
    amplitude = _as_float(doc.pop("amplitude", 1.0), f"{path}.amplitude", positive=True)
    _reject_unknown(doc, path)
    if not isinstance(center, list) or len(center) != 3:
        raise ConfigError(f"{path}.center", "expected a list of three numbers")
    cs = [_as_float(c, f"{path}.center[{i}]") for i, c in enumerate(center)]
    return {"center": cs, "width": width, "amplitude": amplitude}


def _parse_packet(raw: Any, path: str) -> dict:
    doc = _require_mapping(raw, path)
    field = _as_int(doc.pop("field", 2), f"{path}.field", minimum=1)
    if field not in (1, 2):
        raise ConfigError(f"{path}.field", f"must be 1 (light) or 2 (heavy), got {field}")
    temporal = _parse_temporal(doc.pop("temporal", {}), f"{path}.temporal")
    spatial = _parse_spatial(doc.pop("spatial", {}), f"{path}.spatial")
    _reject_unknown(doc, path)
    return {"field": field, "temporal": temporal, "spatial": spatial}


def _default_packets(mode: str, mu: float, m: float) -> list[dict]:
    """Decay-kinematics trio for counterexample runs, one rest packet otherwise."""
    heavy = {
        "field": 2,
        "temporal": {"kind": "gaussian", "width": 1.0, "amplitude": 1.0},
        "spatial": {"center": [0.0, 0.0, 0.0], "width": 0.1, "amplitude": 1.0},
    }
    if mode == "stability":
        return [heavy]
    kstar = math.sqrt(m * m / 4.0 - mu * mu)
    light = lambda sign: {
        "field": 1,
        "temporal": {"kind": "gaussian", "width": 1.0, "amplitude": 1.0},
        "spatial": {"center": [sign * kstar, 0.0, 0.0], "width": 0.1, "amplitude": 1.0},
    }
    return [heavy, light(+1.0), light(-1.0)]


@dataclass(frozen=True)
class RunConfig:
    """Fully validated, fully defaulted run description."""

    mode: str
    mu: float
    m: float
    current_kind: str
    current_mass: float
    rho: dict
    n_ladder: tuple[int, ...]
    packets: tuple[dict, ...]
    mc_samples: int
    mc_seed: int
    quadrature_rel: float
    onshell_zero: float
    gram_neg: float
    output_directory: str
    output_formats: tuple[str, ...]

    def to_document(self) -> dict:
        """Normalized document: serializing and re-parsing it is the identity."""
        return {
            "schema_version": SCHEMA_VERSION,
            "mode": self.mode,
            "masses": {"mu": self.mu, "m": self.m},
            "current_model": {"kind": self.current_kind, "mass": self.current_mass},
            "rho": copy.deepcopy(self.rho),
            "n_ladder": list(self.n_ladder),
            "packets": copy.deepcopy(list(self.packets)),
            "mc": {"samples": self.mc_samples, "seed": self.mc_seed},
            "tolerances": {
                "quadrature_rel": self.quadrature_rel,
                "onshell_zero": self.onshell_zero,
                "gram_neg": self.gram_neg,
            },
            "output": {
                "directory": self.output_directory,
                "formats": list(self.output_formats),
            },
        }

    def serialize(self) -> str:
        return yaml.safe_dump(self.to_document(), sort_keys=True)

    def model_params(self) -> ModelParams:
        return ModelParams(mu=Mass(self.mu), m=Mass(self.m))

    def current(self) -> ModelCurrent:
        mass = Mass(self.current_mass)
        if self.current_kind == "onshell-nonzero":
            return onshell_nonzero_current(mass)
        return onshell_vanishing_current(mass)

    def spectral_measure(self) -> SpectralMeasure:
        return SpectralMeasure.from_dict(self.rho)


def build_temporal(spec: Mapping[str, Any]):
    kind = spec["kind"]
    if kind == "constant":
        return constant_line(spec["amplitude"])
    if kind == "gaussian":
        return gaussian_line(spec["width"], spec["amplitude"])
    return odd_gaussian_line(spec["width"], spec["amplitude"])


def build_packet(spec: Mapping[str, Any], reference_mass: Mass) -> WavePacket:
    """Instantiate one packet document against the mass its shell references."""
    spatial = spec["spatial"]
    envelope = SpatialEnvelope(
        center=np.asarray(spatial["center"], dtype=float),
        width=spatial["width"],
        amplitude=spatial["amplitude"],
    )
    return WavePacket(
        temporal=build_temporal(spec["temporal"]),
        spatial=envelope,
        reference_mass=reference_mass,
    )


def parse_config(text: str | Mapping[str, Any]) -> RunConfig:
    """Validate a YAML document (or pre-parsed mapping) into a RunConfig."""
    if isinstance(text, Mapping):
        raw: Any = copy.deepcopy(dict(text))
    else:
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as err:
            raise ConfigError("document", f"not well-formed YAML: {err}") from err
    if raw is None:
        raw = {}
    doc = _require_mapping(raw, "document")

    version = doc.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            "schema_version", f"unsupported value {version!r} (this tool reads version {SCHEMA_VERSION})"
        )

    mode = _as_str(doc.pop("mode", "stability"), "mode", MODES)
    mu, m = _parse_masses(doc.pop("masses", {}), "masses")
    if mode in ("counterexample", "both") and not m > 2.0 * mu:
        raise ConfigError("masses", "m must exceed 2*mu")

    current_kind, current_mass = _parse_current_model(
        doc.pop("current_model", "onshell-nonzero"), "current_model"
    )
    rho = _parse_rho(doc.pop("rho", _default_rho(current_mass)), "rho")
    n_ladder = _parse_n_ladder(doc.pop("n_ladder", list(DEFAULT_N_LADDER)), "n_ladder")

    raw_packets = doc.pop("packets", None)
    if raw_packets is None:
        raw_packets = _default_packets(mode, mu, m)
    if not isinstance(raw_packets, list) or not raw_packets:
        raise ConfigError("packets", "expected a nonempty list of packet specs")
    packets = tuple(_parse_packet(p, f"packets[{i}]") for i, p in enumerate(raw_packets))
    if mode in ("counterexample", "both"):
        fields = [p["field"] for p in packets]
        if fields != [2, 1, 1]:
            raise ConfigError(
                "packets",
                "counterexample mode takes exactly three packets with fields "
                f"[2, 1, 1] (heavy in, two light out); got {fields}",
            )

    mc = _require_mapping(doc.pop("mc", {}), "mc")
    mc_samples = _as_int(mc.pop("samples", DEFAULT_MC_SAMPLES), "mc.samples")
    if mc_samples < MIN_MC_SAMPLES:
        raise ConfigError("mc", f"samples must be at least {MIN_MC_SAMPLES}, got {mc_samples}")
    mc_seed = _as_int(mc.pop("seed", 0), "mc.seed", minimum=0)
    _reject_unknown(mc, "mc")

    tol = _require_mapping(doc.pop("tolerances", {}), "tolerances")
    quadrature_rel = _as_float(tol.pop("quadrature_rel", 1e-6), "tolerances.quadrature_rel", positive=True)
    onshell_zero = _as_float(tol.pop("onshell_zero", 1e-10), "tolerances.onshell_zero", positive=True)
    gram_neg = _as_float(tol.pop("gram_neg", 1e-3), "tolerances.gram_neg", positive=True)
    _reject_unknown(tol, "tolerances")

    out = _require_mapping(doc.pop("output", {}), "output")
    directory = _as_str(out.pop("directory", "shellcalc-out"), "output.directory")
    if not directory:
        raise ConfigError("output.directory", "must be nonempty")
    raw_formats = out.pop("formats", list(OUTPUT_FORMATS))
    _reject_unknown(out, "output")
    if not isinstance(raw_formats, list) or not raw_formats:
        raise ConfigError("output", "formats must name at least one of csv, json")
    for i, f in enumerate(raw_formats):
        _as_str(f, f"output.formats[{i}]", OUTPUT_FORMATS)
    formats = tuple(f for f in OUTPUT_FORMATS if f in raw_formats)

    _reject_unknown(doc, "document")

    return RunConfig(
        mode=mode,
        mu=mu,
        m=m,
        current_kind=current_kind,
        current_mass=current_mass,
        rho=rho,
        n_ladder=n_ladder,
        packets=packets,
        mc_samples=mc_samples,
        mc_seed=mc_seed,
        quadrature_rel=quadrature_rel,
        onshell_zero=onshell_zero,
        gram_neg=gram_neg,
        output_directory=directory,
        output_formats=formats,
    )


_PRESETS: dict[str, dict] = {
    "onshell-nonzero": {
        "mode": "stability",
        "current_model": "onshell-nonzero",
    },
    "onshell-vanishing": {
        "mode": "stability",
        "current_model": "onshell-vanishing",
    },
    "counterexample-default": {
        "mode": "counterexample",
        "masses": {"mu": 0.5, "m": 2.0},
    },
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_document(name: str) -> dict:
    if name not in _PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return copy.deepcopy(_PRESETS[name])


def preset_config(name: str) -> RunConfig:
    return parse_config(preset_document(name))
