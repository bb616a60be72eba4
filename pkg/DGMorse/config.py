"""
Configuration for the DG-Morse verification toolkit
"""

import os
import logging
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

OUTPUT_FORMATS = ("json", "text")


def _env_workers() -> int:
    raw = os.getenv("DGMORSE_MAX_WORKERS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logging.getLogger(__name__).warning(f"Ignoring non-integer DGMORSE_MAX_WORKERS={raw!r}")
    return os.cpu_count() or 4


class ToolkitConfig:
    """Configuration settings for verification runs"""

    def __init__(self, **kwargs):
        """Initialize configuration with defaults and overrides"""

        # Output settings
        self.output_dir = kwargs.get('output_dir', Path('dgmorse_output'))
        self.output_format = kwargs.get('output_format', 'json')
        self.save_results = kwargs.get('save_results', False)

        # Logging settings
        self.log_level = kwargs.get('log_level', logging.INFO)
        self.log_to_file = kwargs.get('log_to_file', False)

        # Processing settings
        self.max_workers = kwargs.get('max_workers', _env_workers())
        self.use_threads = kwargs.get('use_threads', True)

        # Algebra settings
        self.max_arity = kwargs.get('max_arity', 4)
        self.max_k = kwargs.get('max_k', 4)
        self.r_max = kwargs.get('r_max', 4)
        self.seed = kwargs.get('seed', 0)

        # Sweep settings
        self.iso_instances = kwargs.get('iso_instances', 200)
        self.transfer_instances = kwargs.get('transfer_instances', 100)
        self.quasi_instances = kwargs.get('quasi_instances', 50)
        self.path_instances = kwargs.get('path_instances', 50)
        self.transfer_arity = kwargs.get('transfer_arity', 6)
        self.sweep_min_degree = kwargs.get('sweep_min_degree', 0)
        self.sweep_max_degree = kwargs.get('sweep_max_degree', 2)
        self.sweep_max_dim = kwargs.get('sweep_max_dim', 2)

        # Reporting settings
        self.record_timings = kwargs.get('record_timings', False)

    @property
    def sweep_degrees(self) -> tuple:
        """Degrees of the random complexes drawn by the sweeps"""
        return tuple(range(self.sweep_min_degree, self.sweep_max_degree + 1))

    def to_dict(self) -> dict:
        """Convert configuration to dictionary"""
        return {
            key: value for key, value in self.__dict__.items()
            if not key.startswith('_')
        }

    @classmethod
    def from_dict(cls, config_dict: dict) -> 'ToolkitConfig':
        """Create configuration from dictionary"""
        return cls(**config_dict)

    def validate(self) -> bool:
        """Validate configuration settings"""
        errors = []

        if not isinstance(self.output_dir, (str, Path)):
            errors.append("output_dir must be a string or Path object")

        if self.output_format not in OUTPUT_FORMATS:
            errors.append(f"output_format must be one of {', '.join(OUTPUT_FORMATS)}")

        if self.max_workers < 1:
            errors.append("max_workers must be at least 1")

        if self.max_arity < 1:
            errors.append("max_arity must be at least 1")

        if self.max_k < 0:
            errors.append("max_k must be non-negative")

        if self.r_max < 0:
            errors.append("r_max must be non-negative")

        for name in ('iso_instances', 'transfer_instances', 'quasi_instances', 'path_instances'):
            if getattr(self, name) < 0:
                errors.append(f"{name} must be non-negative")

        if self.transfer_arity < 2:
            errors.append("transfer_arity must be at least 2")

        if self.sweep_min_degree > self.sweep_max_degree:
            errors.append("sweep_min_degree must not exceed sweep_max_degree")

        if self.sweep_max_dim < 1:
            errors.append("sweep_max_dim must be at least 1")

        if errors:
            raise ValueError(f"Configuration validation failed: {'; '.join(errors)}")

        return True

    def update(self, **kwargs):
        """Update configuration settings"""
        for key, value in kwargs.items():
            if hasattr(self, key):
                setattr(self, key, value)
            else:
                raise AttributeError(f"Configuration has no attribute '{key}'")

        self.validate()


class ProfiledConfig:
    """Pre-configured profiles for different use cases"""

    @staticmethod
    def quick() -> ToolkitConfig:
        """Small sweeps for smoke runs and CI"""
        return ToolkitConfig(
            max_arity=4,
            iso_instances=5,
            transfer_instances=5,
            quasi_instances=5,
            path_instances=5,
            transfer_arity=5
        )

    @staticmethod
    def acceptance() -> ToolkitConfig:
        """Full acceptance sweeps"""
        return ToolkitConfig(
            max_arity=5,
            iso_instances=200,
            transfer_instances=100,
            quasi_instances=50,
            path_instances=50,
            transfer_arity=6,
            sweep_min_degree=-2,
            sweep_max_degree=6,
            sweep_max_dim=5
        )
