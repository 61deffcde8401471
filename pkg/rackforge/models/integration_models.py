"""
Pydantic model for the dirty-integration parameters.
"""

import math
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..exceptions import ConfigError


class IntegrationConfig(BaseModel):
    """Cutoff radii, finite-difference step and sampling parameters."""
    model_config = ConfigDict(frozen=True)

    tau_prime: float = Field(math.pi / 2, description="Plateau radius of the cutoff")
    tau: float = Field(math.pi, description="Support radius of the cutoff")
    fd_step: float = Field(1e-3, gt=0)
    samples: int = Field(256, ge=1)
    seed: int = 0
    tol: float = Field(1e-9, gt=0)
    bracket_tol: float = Field(1e-4, gt=0)
    sample_scale: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def check_radii(self) -> "IntegrationConfig":
        if not 0 < self.tau_prime < self.tau:
            raise ValueError(f"need 0 < tau_prime < tau, got tau_prime={self.tau_prime}, tau={self.tau}")
        # Small slack so that tau=math.pi itself is accepted.
        if self.tau > math.pi * (1 + 1e-12):
            raise ValueError(f"tau must not exceed pi, got {self.tau}")
        return self

    @classmethod
    def from_settings(cls, settings: Optional[Any] = None, **overrides: Any) -> "IntegrationConfig":
        """Build from a RackforgeConfig plus explicit overrides (None values are ignored)."""
        values = {}
        if settings is not None:
            for name in cls.model_fields:
                value = settings.get(name)
                if value is not None:
                    values[name] = value
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"invalid integration config: {e.errors()[0]['msg']}") from e
