"""Run configuration: flat dotted-key defaults, YAML loading and validation."""

from dataclasses import dataclass, field
import logging
import os

import yaml

from errors import ConfigError
from models import QuadConfig, TruncationConfig
from services.catalog import FAMILIES
from services.verifier import DEFAULT_TOLERANCES, SuiteContext

logger = logging.getLogger("sdspace.config")

OUT_ENV = "SDSPACE_OUT"

DEFAULTS = {
    "dimension": 1,
    "truncation.k_max": 12,
    "truncation.m_max": 2000,
    "truncation.box_radius": 8.0,
    "truncation.weighting": "level",
    "quadrature.points_per_panel": 16,
    "quadrature.abs_tol": 1e-10,
    "quadrature.max_panels_per_axis": 4096,
    "quadrature.max_cube_nodes": 2097152,
    "workers": 1,
    "seed": 20240611,
    "output.dir": "reports",
    "output.contributions": False,
    "suites": ["all"],
    "compactness.decay_factor": 0.2,
    "compactness.m_values": [1, 4, 16, 64],
    "nonabsolute.radii": [10, 100, 1000],
    "nonabsolute.growth_factor": 2.0,
    "ns_ratio.lambdas": [0.5, 1, 2, 4],
    "ns_ratio.max_spread": 10.0,
    "ns_ratio.assert_spread": True,
    "ns_ratio.flow_radius": 40.0,
    "alexiewicz.grid": 64,
}
DEFAULTS.update({f"tolerance.{name}": value for name, value in DEFAULT_TOLERANCES.items()})

INTEGER_KEYS = {
    "dimension",
    "truncation.k_max",
    "truncation.m_max",
    "quadrature.points_per_panel",
    "quadrature.max_panels_per_axis",
    "quadrature.max_cube_nodes",
    "workers",
    "seed",
    "alexiewicz.grid",
}
BOOLEAN_KEYS = {"output.contributions", "ns_ratio.assert_spread"}
LIST_KEYS = {"suites", "compactness.m_values", "nonabsolute.radii", "ns_ratio.lambdas"}


def flatten(mapping, prefix=""):
    """Nested mappings become dotted keys; dotted keys pass through"""
    flat = {}
    for key, value in (mapping or {}).items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def _catalog_key(key):
    parts = key.split(".")
    return len(parts) == 3 and parts[0] == "catalog" and parts[1] in FAMILIES


def read_yaml(path):
    try:
        with open(path) as handle:
            loaded = yaml.safe_load(handle)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {str(e)}")
    except yaml.YAMLError as e:
        raise ConfigError(f"config {path} is not valid YAML: {str(e)}")
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return loaded


def _coerce(key, value):
    try:
        if key in BOOLEAN_KEYS:
            if not isinstance(value, bool):
                raise ValueError("expected true or false")
            return value
        if key in LIST_KEYS:
            items = value if isinstance(value, (list, tuple)) else [value]
            return [str(v) for v in items] if key == "suites" else [float(v) for v in items]
        if key in INTEGER_KEYS:
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError("expected an integer")
            return int(value)
        default = DEFAULTS[key]
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad value for {key}: {value!r} ({str(e)})")


@dataclass
class RunConfig:
    settings: dict
    catalog: dict = field(default_factory=dict)
    source: str = None

    @property
    def dimension(self):
        return self.settings["dimension"]

    @property
    def workers(self):
        return self.settings["workers"]

    @property
    def seed(self):
        return self.settings["seed"]

    @property
    def out_dir(self):
        return self.settings["output.dir"]

    @property
    def contributions(self):
        return self.settings["output.contributions"]

    @property
    def suites(self):
        return self.settings["suites"]

    @property
    def quad(self):
        return QuadConfig(
            points_per_panel=self.settings["quadrature.points_per_panel"],
            max_panels_per_axis=self.settings["quadrature.max_panels_per_axis"],
            abs_tol=self.settings["quadrature.abs_tol"],
            max_cube_nodes=self.settings["quadrature.max_cube_nodes"],
        )

    @property
    def trunc(self):
        return TruncationConfig(
            k_max=self.settings["truncation.k_max"],
            m_max=self.settings["truncation.m_max"],
            box_radius=self.settings["truncation.box_radius"],
            quad=self.quad,
            weighting=self.settings["truncation.weighting"],
        )

    def suite_context(self, pool=None):
        return SuiteContext(
            trunc=self.trunc,
            pool=pool,
            settings=dict(self.settings),
            dimension=self.dimension,
            seed=self.seed,
            catalog=self.catalog,
        )

    def to_dict(self):
        out = dict(self.settings)
        out.update({f"catalog.{family}.{k}": v for family, params in self.catalog.items() for k, v in params.items()})
        return out


def build_config(raw=None, source=None, env=None):
    env = os.environ if env is None else env
    settings = dict(DEFAULTS)
    catalog = {}
    unknown = []
    for key, value in flatten(raw).items():
        if _catalog_key(key):
            _, family, param = key.split(".")
            catalog.setdefault(family, {})[param] = value
        elif key in DEFAULTS:
            settings[key] = _coerce(key, value)
        else:
            unknown.append(key)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if env.get(OUT_ENV):
        settings["output.dir"] = env[OUT_ENV]
    settings["compactness.m_values"] = [int(m) for m in settings["compactness.m_values"]]

    if not 1 <= settings["dimension"] <= 4:
        raise ConfigError("dimension must be between 1 and 4")
    if settings["workers"] < 1:
        raise ConfigError("workers must be at least 1")
    if settings["truncation.weighting"] not in ("level", "normalized"):
        raise ConfigError(f"unknown weighting {settings['truncation.weighting']!r}")
    if settings["truncation.k_max"] < 1 or settings["truncation.m_max"] < 1:
        raise ConfigError("truncation.k_max and truncation.m_max must be positive")
    if settings["truncation.box_radius"] <= 0:
        raise ConfigError("truncation.box_radius must be positive")
    if settings["ns_ratio.flow_radius"] <= 0:
        raise ConfigError("ns_ratio.flow_radius must be positive")
    try:
        config = RunConfig(settings, catalog, source)
        config.trunc
    except ValueError as e:
        raise ConfigError(f"invalid truncation settings: {str(e)}")
    return config


def load_config(path=None, overrides=None, env=None):
    raw = flatten(read_yaml(path)) if path else {}
    raw.update(flatten(overrides))
    config = build_config(raw, path, env)
    logger.info(f"Loaded config from {path or 'defaults'}: n={config.dimension}, workers={config.workers}")
    return config
