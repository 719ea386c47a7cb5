import os
from contextlib import contextmanager
from dataclasses import dataclass, fields
from typing import Dict, Iterator, Optional

from dotenv import load_dotenv

from utils.errors import ConfigError

# Load environment variables
load_dotenv()


@dataclass
class Settings:
    factor_trial_limit: int = 10**6
    factor_rho_iterations: int = 200_000
    factor_rho_attempts: int = 8
    primality_rounds: int = 32
    iterate_max_slots: int = 2**20
    oracle_max_degree: int = 16
    oracle_primes: int = 5
    oracle_subset_budget: int = 20_000
    census_max_volume: int = 50_000_000
    census_workers: int = 1
    database_url: str = "sqlite:///census.db"
    log_level: str = "INFO"

    @classmethod
    def from_env(cls, environ: Optional[Dict[str, str]] = None) -> "Settings":
        """
        Builds settings from environment variables

        Every field maps to the upper-cased variable of the same name,
        e.g. ``factor_trial_limit`` is read from ``FACTOR_TRIAL_LIMIT``.

        Args:
            environ: Mapping to read from (defaults to os.environ)

        Returns:
            Settings: Validated settings
        """
        environ = os.environ if environ is None else environ
        values = {}
        for field in fields(cls):
            raw = environ.get(field.name.upper())
            if raw is None or raw == "":
                continue
            if field.type in (int, "int"):
                try:
                    value = int(raw)
                except ValueError:
                    raise ConfigError(f"{field.name.upper()} must be an integer, got {raw!r}")
                if value < 1:
                    raise ConfigError(f"{field.name.upper()} must be positive, got {value}")
                values[field.name] = value
            else:
                values[field.name] = raw
        return cls(**values)

    @contextmanager
    def override(self, **values) -> Iterator["Settings"]:
        """Temporarily replace fields; None values are ignored"""
        known = {f.name for f in fields(self)}
        values = {name: value for name, value in values.items() if value is not None}
        for name, value in values.items():
            if name not in known:
                raise ConfigError(f"unknown setting {name!r}")
            if isinstance(value, int) and value < 1:
                raise ConfigError(f"{name} must be positive, got {value}")
        saved = {name: getattr(self, name) for name in values}
        for name, value in values.items():
            setattr(self, name, value)
        try:
            yield self
        finally:
            for name, value in saved.items():
                setattr(self, name, value)


# Create a global settings object
settings = Settings.from_env()
