"""
Environment settings

Process-level defaults read from the environment (prefix ``LDP_``) or a local
``.env`` file. Run-level parameters live in RunConfig, not here.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment-driven defaults for the CLI."""

    model_config = SettingsConfigDict(env_prefix="LDP_", env_file=".env", extra="ignore")

    output_root: str = Field(default="runs", description="Default root for run directories")
    workers: int = Field(default=1, ge=1, description="Default worker count for Monte Carlo")


def get_settings() -> Settings:
    """Read settings fresh from the environment."""
    return Settings()
