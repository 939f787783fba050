"""YAML run configuration: schema, defaults and validation.

The schema below is the single source of truth; ``docs/config.md`` describes
it in prose and ``configs/`` has one example per command.
"""

import copy
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import yaml

from .geometry import GeometryError, build_domain


class ConfigError(ValueError):
    """The configuration file is missing, malformed or inconsistent."""


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}


def _block(props, required=()):
    return {"type": "object", "additionalProperties": False, "properties": props,
            "required": list(required)}


SCHEMA = _block({
    "command": {"enum": ["analyze", "construct-pattern", "simulate", "eigen", "report"]},
    "geometry": _block({
        "kind": {"enum": ["cylinder", "cone", "catenoid", "sphere", "exponential", "wavy",
                          "plane", "model"]},
        "interval": _pair,
        "params": {"type": "object"},
    }, required=["kind"]),
    "nonlinearity": _block({
        "kind": {"enum": ["zero", "linear", "cubic", "power", "polynomial", "affine",
                          "constructed"]},
        "params": {"type": "object"},
        "artifact": {"type": "string"},
    }, required=["kind"]),
    "alpha": _num,
    "seed": {"type": "integer", "minimum": 0},
    "stationary": _block({
        "c_range": _pair,
        "n_scan": {"type": "integer", "minimum": 2},
        "n": {"type": "integer", "minimum": 16},
        "tol": _pos,
        "blowup": _pos,
    }),
    "spectrum": _block({
        "n": {"type": "integer", "minimum": 32},
        "k_max": {"type": "integer", "minimum": 1},
        "extrapolate": {"type": "boolean"},
        "base": {"enum": ["zero", "stationary"]},
        "index": {"type": "integer", "minimum": 0},
    }),
    "analyze": _block({
        "constant_query": {"type": "boolean"},
        "gradient_bound": {"type": "boolean"},
    }),
    "pattern": _block({
        "beta": _pos,
        "n": {"type": "integer", "minimum": 64},
        "l": {"type": "integer", "minimum": 1},
        "B": _pos,
        "k_max": {"type": "integer", "minimum": 1},
        "B_cap": _pos,
    }),
    "simulate": _block({
        "T": _pos,
        "n": {"type": "integer", "minimum": 8},
        "dt": _pos,
        "method": {"enum": ["euler", "rk4"]},
        "epsilon": {"type": "number", "minimum": 0},
        "perturbation": {"enum": ["eigen", "random", "zero"]},
        "mode_k": {"type": "integer", "minimum": 0},
        "n_theta": {"type": "integer", "minimum": 4},
        "reference": {"oneOf": [{"enum": ["pattern", "zero"]}, {"type": "integer", "minimum": 0}]},
        "n_samples": {"type": "integer", "minimum": 10},
        "tol_rate": _pos,
        "skip": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "safety": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    }),
    "report": _block({"source": {"type": "string"}}),
    "output": _block({"dir": {"type": "string"}}),
})

DEFAULTS = {
    "seed": 0,
    "stationary": {"c_range": [-2.0, 2.0], "n_scan": 81, "n": 1024, "tol": 1e-10, "blowup": 1e8},
    "spectrum": {"n": 2048, "k_max": 4, "extrapolate": True, "base": "zero", "index": 0},
    "analyze": {"constant_query": False, "gradient_bound": True},
    "pattern": {"beta": 1.0, "n": 2048, "k_max": 4, "B_cap": 1e12},
    "simulate": {"T": 5.0, "n": 128, "method": "euler", "epsilon": 1e-4, "perturbation": "eigen",
                 "mode_k": 0, "reference": 0, "n_samples": 200, "tol_rate": 1e-3, "skip": 0.2,
                 "safety": 0.4},
    "report": {},
    "output": {"dir": "out"},
}


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


@dataclass
class RunConfig:
    geometry: dict = None
    nonlinearity: dict = None
    alpha: float = None
    seed: int = 0
    stationary: dict = field(default_factory=dict)
    spectrum: dict = field(default_factory=dict)
    analyze: dict = field(default_factory=dict)
    pattern: dict = field(default_factory=dict)
    simulate: dict = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    command: str = None
    base_dir: Path = Path(".")
    raw: dict = field(default_factory=dict)     # the document as written, before defaults

    def resolve(self, path):
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def artifact(self):
        if self.nonlinearity and self.nonlinearity.get("kind") == "constructed":
            return self.resolve(self.nonlinearity["artifact"])
        return None

    def domain(self):
        if self.geometry is None:
            raise ConfigError("the 'geometry' block is required for this command")
        try:
            return build_domain(self.geometry)
        except GeometryError as exc:
            raise ConfigError(f"geometry: {exc}") from exc


def parse_config(doc, base_dir="."):
    """Validate a config mapping against the schema and fill in defaults."""
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping at the top level")
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<top>"
        raise ConfigError(f"{where}: {exc.message}") from None
    full = _merge(DEFAULTS, doc)
    cfg = RunConfig(**full, base_dir=Path(base_dir), raw=copy.deepcopy(doc))
    c_lo, c_hi = cfg.stationary["c_range"]
    if not c_lo < c_hi:
        raise ConfigError("stationary/c_range must be increasing")
    if "l" in cfg.pattern and cfg.pattern["l"] % 2 == 0:
        raise ConfigError("pattern/l must be odd")
    nl = cfg.nonlinearity
    if nl is not None:
        if nl["kind"] == "constructed":
            if "artifact" not in nl:
                raise ConfigError("nonlinearity/artifact is required for kind 'constructed'")
            if not cfg.artifact.is_file():
                raise ConfigError(f"pattern artifact not found: {cfg.artifact}")
        elif "artifact" in nl:
            raise ConfigError("nonlinearity/artifact is only used with kind 'constructed'")
    if cfg.geometry is not None:
        cfg.domain()
    return cfg


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return parse_config(doc, base_dir=path.parent)
