"""
Application configuration using Pydantic Settings.
"""
from fractions import Fraction
from typing import List, Literal, Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from app.exceptions import ConfigurationError


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Logging
    log_level: str = "INFO"

    # Grid defaults. The step is kept as text so "1/2" survives the env file.
    default_step: str = "1"
    default_clock_cap: Optional[int] = None  # None means largest constant + 1

    # MECS semantics
    delay_mode: Literal["point", "interval"] = "point"
    timing: Literal["standard", "urgent"] = "standard"

    # Budgets
    state_budget: int = 200_000
    enumeration_budget: int = 20_000

    # API Configuration
    api_host: str = "0.0.0.0"
    api_port: int = 8000
    cors_origins: str = "http://localhost:3000"

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=False,
        extra="ignore"  # Ignore extra fields in .env file that aren't defined in Settings
    )

    @property
    def step(self) -> Fraction:
        """Parse the default grid step as an exact rational."""
        try:
            value = Fraction(self.default_step.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigurationError(f"Invalid default_step {self.default_step!r}") from exc
        if value <= 0:
            raise ConfigurationError(f"default_step must be positive, got {value}")
        return value

    @property
    def cors_origins_list(self) -> List[str]:
        """Convert comma-separated CORS origins to list."""
        return [origin.strip() for origin in self.cors_origins.split(",") if origin.strip()]


settings = Settings()
