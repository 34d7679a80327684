from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

PROJECT_ROOT = Path(__file__).resolve().parent.parent


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="TRISOLVE_",
        env_file=PROJECT_ROOT / ".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Parallelism (TRISOLVE_THREADS caps every parallel map)
    threads: int = 1

    # Logging
    log_level: str = "INFO"

    # Run ledger
    database_url: str = f"sqlite:///{PROJECT_ROOT / 'data' / 'trisolve.db'}"
    record_runs: bool = True

    # Artifacts
    output_root: str = str(PROJECT_ROOT / "out")

    @property
    def worker_count(self) -> int:
        """Thread cap, never below one."""
        try:
            return max(1, int(self.threads))
        except (TypeError, ValueError):
            return 1


settings = Settings()
