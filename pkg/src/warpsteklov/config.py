"""Experiment configuration: bracketed sections of key = value lines.

Grammar (INI-style, parsed strictly; unknown sections or keys are errors):

    [profile]
    kind = side_bump          # constant | affine | exponential | polynomial
                              # | gaussian_bump | side_bump | expression
    n = 2
    omega = 6.0
    ... kind-specific keys ...

    [transversal]
    source = circle           # circle | sphere | custom
    count = 8
    radius = 1.0              # circle
    dimension = 2             # sphere
    values = 0, 1.5, 4.2      # custom

    [run]
    ... command-specific keys, see _RUN_KEYS ...

    [output]
    directory = out
    formats = csv, json, plotdata
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError
from . import geometry as geom

_PROFILE_KEYS = {
    "constant": {"value"},
    "affine": {"intercept", "slope"},
    "exponential": {"amplitude", "rate"},
    "polynomial": {"coefficients"},
    "gaussian_bump": {"base", "height", "center", "width"},
    "side_bump": {"base", "curvature", "start", "width", "height", "sharpness"},
    "expression": {"formula"},
}

_TRANSVERSAL_KEYS = {"source", "count", "radius", "dimension", "values"}

_RUN_KEYS = {
    "spectrum": {"grid_points"},
    "eigenfunction": {"grid_points", "modes", "branches", "normalization"},
    "asymptotics": {"grid_points", "fit_lo", "fit_hi", "epsilon"},
    "localize": {"grid_points", "both_threshold", "epsilon"},
    "flea": {"grid_points", "bump_kind", "bump_start", "bump_width",
             "bump_sharpness", "deltas"},
    "verify": set(),
}

_FORMATS = {"csv", "json", "plotdata"}


@dataclass
class ExperimentConfig:
    profile: geom.WarpingProfile
    spectrum: geom.TransversalSpectrum
    run: dict = field(default_factory=dict)
    out_dir: str = "out"
    formats: tuple = ("csv", "json")


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc


def _float(section, key, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    try:
        return float(section[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r} is not a number: {section[key]!r}") from exc


def _int(section, key, default=None):
    v = _float(section, key, default)
    if v != int(v):
        raise ConfigError(f"key {key!r} must be an integer")
    return int(v)


def _build_profile(sec) -> geom.WarpingProfile:
    kind = sec.get("kind")
    if kind not in _PROFILE_KEYS:
        raise ConfigError(f"unknown profile kind {kind!r}; pick one of {sorted(_PROFILE_KEYS)}")
    allowed = _PROFILE_KEYS[kind] | {"kind", "n", "omega"}
    unknown = set(sec) - allowed
    if unknown:
        raise ConfigError(f"unknown [profile] keys for kind {kind}: {sorted(unknown)}")
    n = _int(sec, "n")
    omega = _float(sec, "omega", 0.0)
    try:
        if kind == "constant":
            return geom.constant_profile(_float(sec, "value"), n, omega)
        if kind == "affine":
            return geom.affine_profile(_float(sec, "intercept"), _float(sec, "slope"), n, omega)
        if kind == "exponential":
            return geom.exponential_profile(_float(sec, "amplitude"), _float(sec, "rate"), n, omega)
        if kind == "polynomial":
            return geom.polynomial_profile(_floats(sec["coefficients"]), n, omega)
        if kind == "gaussian_bump":
            return geom.gaussian_bump_profile(_float(sec, "base"), _float(sec, "height"),
                                              _float(sec, "center"), _float(sec, "width"), n, omega)
        if kind == "side_bump":
            return geom.side_bump_profile(_float(sec, "base"), _float(sec, "curvature", 0.0),
                                          _float(sec, "start"), _float(sec, "width"),
                                          _float(sec, "height"), n, omega,
                                          sharpness=_float(sec, "sharpness", 1.0))
        return geom.profile_from_expr(sec["formula"], n, omega)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"invalid profile parameters: {exc}") from exc


def _build_spectrum(sec) -> geom.TransversalSpectrum:
    unknown = set(sec) - _TRANSVERSAL_KEYS
    if unknown:
        raise ConfigError(f"unknown [transversal] keys: {sorted(unknown)}")
    source = sec.get("source", "circle")
    count = _int(sec, "count")
    try:
        if source == "custom":
            return geom.transversal_spectrum("custom", count, values=_floats(sec["values"])[:count])
        return geom.transversal_spectrum(source, count,
                                         radius=_float(sec, "radius", 1.0),
                                         dim=_int(sec, "dimension", 2))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"invalid transversal spectrum: {exc}") from exc


def load_config(path: str, command: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc

    known_sections = {"profile", "transversal", "run", "output"}
    unknown = set(parser.sections()) - known_sections
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    for required in ("profile", "transversal"):
        if required not in parser:
            raise ConfigError(f"config is missing the [{required}] section")

    profile = _build_profile(parser["profile"])
    spectrum = _build_spectrum(parser["transversal"])

    run = {}
    if "run" in parser:
        allowed = _RUN_KEYS.get(command, set())
        unknown = set(parser["run"]) - allowed
        if unknown:
            raise ConfigError(f"unknown [run] keys for command {command!r}: {sorted(unknown)}")
        run = dict(parser["run"])

    out_dir = "out"
    formats = ("csv", "json")
    if "output" in parser:
        sec = parser["output"]
        unknown = set(sec) - {"directory", "formats"}
        if unknown:
            raise ConfigError(f"unknown [output] keys: {sorted(unknown)}")
        out_dir = sec.get("directory", out_dir)
        if "formats" in sec:
            fmts = tuple(t.strip() for t in sec["formats"].split(",") if t.strip())
            bad = set(fmts) - _FORMATS
            if bad:
                raise ConfigError(f"unknown output formats: {sorted(bad)}")
            formats = fmts

    return ExperimentConfig(profile=profile, spectrum=spectrum, run=run,
                            out_dir=out_dir, formats=formats)
