from __future__ import annotations

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    app_name: str = "foldsieve"
    log_level: str = "INFO"
    segment_size: int = 2**20
    threads: int = 1
    seed: int = 0
    table_limit: int = 400_000
    mertens_limit: int = 10_000_000
    identity_period_budget: int = 10**9
    sweep_period_limit: int = 10**7
    sweep_instances: int = 200
    goldbach_block: int = 2**20
    database_url: str = "sqlite:///./data/foldsieve.db"
    ledger_enabled: bool = True
    report_dir: str = "./reports"
    archive_reports: bool = False

    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", env_prefix="FOLDSIEVE_"
    )


settings = Settings()
