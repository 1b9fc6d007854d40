from pathlib import Path
from pydantic_settings import BaseSettings, SettingsConfigDict

# Project root (repo root) so that `.env` at repository root is discovered
# config.py is at app/core/config.py -> parents[2] points to repo root
BASE_DIR = Path(__file__).resolve().parents[2]


class Settings(BaseSettings):
    PROJECT_NAME: str = "secretary-thresholds"
    ARTIFACT_VERSION: str = "1.0.0"
    LOG_LEVEL: str = "WARNING"

    # Monte Carlo defaults
    DEFAULT_SEED: int = 20240521
    DEFAULT_TRIALS: int = 100_000
    WORKERS: int = 1
    TRIAL_BLOCK_SIZE: int = 10_000

    # Numerical tolerances
    QUANTILE_TOL: float = 1e-12
    BRACKET_MAX_DOUBLINGS: int = 200
    SERIES_TOL: float = 1e-17

    # Resource guards
    ENUMERATION_LIMIT: int = 10**7
    DP_LIMIT: int = 10**8
    SUBSET_TABLE_MAX_BINS: int = 20
    LEMMA1_MAX_N: int = 20

    # Sample-based pipeline: f1 = f2 = TAIL_FACTOR * eps, f3 = -eps / (ACCURACY_FACTOR * ln eps)
    TAIL_FACTOR: float = 0.1
    FAILURE_FACTOR: float = 0.1
    ACCURACY_FACTOR: float = 100.0
    DELTA_FLOOR: float = 1e-12

    # Verification suites (desk scale)
    VERIFY_LEMMA1_VECTORS: int = 100
    VERIFY_LEMMA1_MAX_N: int = 10
    VERIFY_NEGDEP_MAX_BALLS: int = 6
    VERIFY_NEGDEP_MAX_BINS: int = 4
    VERIFY_SAMPLES_REPETITIONS: int = 200
    VERIFY_SAMPLES_MIN_HIT_RATE: float = 0.90

    model_config = SettingsConfigDict(
        env_file=str(BASE_DIR / ".env"),
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",  # Ignore env vars we don't explicitly declare
    )


settings = Settings()
