import os
from fractions import Fraction
from typing import Optional

import yaml
from dotenv import load_dotenv
from app.config.config_schema import AppConfig, ComputeConfig, ToleranceConfig, OutputConfig, LoggingConfig
from app.utils.errors import ConfigError

RANK_METHODS = ("exact", "modular")
MODULE_KINDS = ("trivial", "fund", "antifund")

def validate_config(config: AppConfig) -> AppConfig:
    """Rejects values no computation can run with."""
    compute = config.compute
    if compute.n < 2:
        raise ConfigError(f"N must be at least 2, got {compute.n}")
    if compute.rank_method not in RANK_METHODS:
        raise ConfigError(f"Unknown rank_method {compute.rank_method!r}; expected one of {RANK_METHODS}")
    if compute.q_order < 1 or compute.max_degree < 1 or compute.pole_bound() < 1:
        raise ConfigError("Truncation orders q_order, max_degree and max_pole must be positive")
    for kind in compute.modules:
        if kind not in MODULE_KINDS:
            raise ConfigError(f"Unknown module {kind!r}; expected one of {MODULE_KINDS}")
    for prime in compute.primes:
        if (prime - 1) % compute.n != 0:
            raise ConfigError(f"Prime {prime} is not 1 mod N={compute.n}")
    return config

def load_config(config_path: str = "config.yml") -> AppConfig:
    """Loads configuration from environment variables and YAML file."""
    # Load .env file if it exists
    load_dotenv()

    output_path = os.getenv("TWISTWZW_OUTPUT_PATH")
    log_level = os.getenv("TWISTWZW_LOG_LEVEL")
    seed = os.getenv("TWISTWZW_SEED")

    yaml_data = {}
    if os.path.exists(config_path):
        try:
            with open(config_path, "r") as f:
                yaml_data = yaml.safe_load(f) or {}
        except Exception as e:
            raise ConfigError(f"Failed to parse config file {config_path}: {e}")

    # Parse sections
    compute_data = yaml_data.get("compute", {}) or {}
    tolerance_data = yaml_data.get("tolerance", {}) or {}
    output_data = yaml_data.get("output", {}) or {}
    logging_data = yaml_data.get("logging", {}) or {}

    defaults = ComputeConfig()
    tol_defaults = ToleranceConfig()
    try:
        config = AppConfig(
            compute=ComputeConfig(
                n=int(compute_data.get("n", defaults.n)),
                level=Fraction(str(compute_data.get("level", defaults.level))),
                q_order=int(compute_data.get("q_order", defaults.q_order)),
                max_degree=int(compute_data.get("max_degree", defaults.max_degree)),
                max_pole=_optional_int(compute_data.get("max_pole")),
                points=[str(p) for p in compute_data.get("points", defaults.points)],
                modules=list(compute_data.get("modules", defaults.modules)),
                rank_method=compute_data.get("rank_method", defaults.rank_method),
                primes=[int(p) for p in compute_data.get("primes", defaults.primes)],
                seed=int(seed if seed is not None else compute_data.get("seed", defaults.seed)),
            ),
            tolerance=ToleranceConfig(
                pole=float(tolerance_data.get("pole", tol_defaults.pole)),
                cybe=float(tolerance_data.get("cybe", tol_defaults.cybe)),
                flatness=float(tolerance_data.get("flatness", tol_defaults.flatness)),
                transport=float(tolerance_data.get("transport", tol_defaults.transport)),
                transport_atol=float(tolerance_data.get("transport_atol", tol_defaults.transport_atol)),
                degeneration_slope=float(tolerance_data.get("degeneration_slope", tol_defaults.degeneration_slope)),
            ),
            output=OutputConfig(
                output_path=output_path or output_data.get("output_path", "./output"),
                write_csv=bool(output_data.get("write_csv", False)),
            ),
            logging=LoggingConfig(
                level=log_level or logging_data.get("level", "INFO")
            ),
        )
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"Invalid value in config file {config_path}: {e}")

    return validate_config(config)

def apply_overrides(config: AppConfig, namespace) -> AppConfig:
    """Replaces config fields with the CLI flags that were given."""
    compute = config.compute
    for attr, key in (("n", "n"), ("level", "k"), ("q_order", "q_order"),
                      ("max_degree", "max_degree"), ("max_pole", "max_pole"), ("seed", "seed")):
        value = getattr(namespace, key, None)
        if value is not None:
            setattr(compute, attr, value)
    if getattr(namespace, "rank", None):
        compute.rank_method = namespace.rank
    if getattr(namespace, "points", None):
        compute.points = list(namespace.points)
    if getattr(namespace, "modules", None):
        compute.modules = list(namespace.modules)
    if getattr(namespace, "output", None):
        config.output.output_path = namespace.output
    if getattr(namespace, "csv", False):
        config.output.write_csv = True
    return validate_config(config)

def _optional_int(value) -> Optional[int]:
    return None if value is None else int(value)
