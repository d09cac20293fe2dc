"""Configuration management for dilution-gt."""

import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

from .codes import DEFAULT_VERIFY_BUDGET
from .errors import UsageError
from .harness import DEFAULT_SIM_BUDGET
from .measurement import DEFAULT_MATRIX_BUDGET
from .plan import ChernoffParams, NoiseParams

logger = logging.getLogger(__name__)


@dataclass
class Config:
    """Defaults used by every command unless overridden on the command line."""

    lambda_: float = 1 / 3
    xi: float = 0.001
    delta: float = 0.001
    theta0: float = 0.2
    theta1: float = 0.1
    verify_budget: int = DEFAULT_VERIFY_BUDGET
    sim_budget: int = DEFAULT_SIM_BUDGET
    matrix_budget: int = DEFAULT_MATRIX_BUDGET
    workers: int = 1
    strict: bool = False

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        """Create config from dictionary, ignoring unknown keys."""
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def noise(self) -> NoiseParams:
        return NoiseParams(self.theta0, self.theta1)

    @property
    def chernoff(self) -> ChernoffParams:
        return ChernoffParams(self.lambda_, self.xi)

    def validate(self) -> None:
        """Raise if any setting is out of range."""
        self.noise
        self.chernoff
        if not 0.0 < self.delta < 1.0:
            raise UsageError(f"delta must lie in (0, 1), got {self.delta}")
        for name in ("verify_budget", "sim_budget", "matrix_budget", "workers"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive, got {getattr(self, name)}")


class ConfigManager:
    """Manages configuration file operations."""

    def __init__(self, config_path: Optional[Path] = None):
        self.config_path = config_path or Path.home() / ".dilution-gt" / "config.json"
        self.config_path.parent.mkdir(parents=True, exist_ok=True)

    def load(self) -> Config:
        """Load configuration from file or fall back to defaults."""
        if self.config_path.exists():
            try:
                with open(self.config_path, "r") as f:
                    data = json.load(f)
                return Config.from_dict(data)
            except (json.JSONDecodeError, TypeError) as exc:
                logger.warning("ignoring unreadable config %s: %s", self.config_path, exc)
        return Config()

    def save(self, config: Config) -> None:
        with open(self.config_path, "w") as f:
            json.dump(config.to_dict(), f, indent=2)

    def update(self, **kwargs: Any) -> Config:
        """Update configuration with new values; unknown keys are ignored."""
        config = self.load()
        for key, value in kwargs.items():
            if hasattr(config, key):
                setattr(config, key, value)
        config.validate()
        self.save(config)
        return config
