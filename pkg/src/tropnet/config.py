"""
Configuration management for tropnet
"""

import os
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError
from pydantic import field_validator

from .exceptions import ConfigurationError

_LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


class RuntimeConfig(BaseModel):
    """Process-wide runtime configuration"""

    seed: int = Field(default=0, ge=0, description="Default random seed")
    threads: int = Field(default=1, ge=1, description="Worker processes for parallel loops")
    out_dir: str = Field(default="results", description="Directory for reports and manifests")
    log_level: str = Field(default="INFO", description="Logging level")
    log_to_file: bool = Field(default=False, description="Also write rotating log files")

    model_config = ConfigDict(validate_assignment=True)

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v):
        level = str(v).upper()
        if level not in _LOG_LEVELS:
            raise ValueError(f"Unknown log level '{v}', expected one of {_LOG_LEVELS}")
        return level


class HoffmanConfig(BaseModel):
    """Hoffman constant computation settings"""

    subset_cap: int = Field(
        default=16, ge=1, le=24, description="Largest row count enumerated over all subsets"
    )
    lower_iterations: int = Field(
        default=100, ge=1, description="Random subsets drawn by the lower bound"
    )
    upper_padding: float = Field(
        default=1e-9, ge=0.0, description="Padding added to floating-point upper bounds"
    )
    rank_tolerance: float = Field(
        default=1e-12, gt=0.0, description="Singular values below this count as zero"
    )

    model_config = ConfigDict(validate_assignment=True)


class SamplingDefaults(BaseModel):
    """Defaults for numerical region estimation"""

    box_radius: float = Field(default=5.0, gt=0.0, description="Half-width R of the cube")
    npoints: int = Field(default=1000, ge=1, description="Number of sample points N")
    scheme: str = Field(default="uniform", description="Sampling scheme: uniform or grid")
    decimals: int = Field(default=10, ge=0, description="Rounding applied to Jacobians")

    @field_validator("scheme")
    @classmethod
    def validate_scheme(cls, v):
        if v not in ("uniform", "grid"):
            raise ValueError(f"Unknown sampling scheme '{v}'")
        return v


class ExperimentDefaults(BaseModel):
    """Defaults for the experiment harness"""

    trials: int = Field(default=25, ge=1, description="Random networks per architecture")
    repetitions: int = Field(default=10, ge=1, description="Repetitions of the ratio experiment")
    hoffman_instances: int = Field(default=8, ge=1, description="Instances per Hoffman table")


class Settings(BaseModel):
    """Main application settings"""

    runtime: RuntimeConfig = Field(default_factory=RuntimeConfig)
    hoffman: HoffmanConfig = Field(default_factory=HoffmanConfig)
    sampling: SamplingDefaults = Field(default_factory=SamplingDefaults)
    experiment: ExperimentDefaults = Field(default_factory=ExperimentDefaults)

    model_config = ConfigDict(extra="ignore", validate_assignment=True)

    @classmethod
    def from_env(cls, env_file: Optional[str] = None) -> "Settings":
        """Load settings from environment variables and .env file"""
        from dotenv import load_dotenv

        load_dotenv(env_file)

        runtime = {}
        for field, var in (
            ("seed", "TROPNET_SEED"),
            ("threads", "TROPNET_THREADS"),
            ("out_dir", "TROPNET_OUT_DIR"),
            ("log_level", "TROPNET_LOG_LEVEL"),
        ):
            value = os.getenv(var)
            if value:
                runtime[field] = value

        hoffman = {}
        subset_cap = os.getenv("TROPNET_SUBSET_CAP")
        if subset_cap:
            hoffman["subset_cap"] = subset_cap

        try:
            return cls(runtime=RuntimeConfig(**runtime), hoffman=HoffmanConfig(**hoffman))
        except PydanticValidationError as e:
            raise ConfigurationError(f"Invalid TROPNET_* environment: {e}") from e


# Global settings instance
settings = Settings.from_env()
