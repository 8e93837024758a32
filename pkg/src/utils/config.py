"""Application configuration."""
import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Application configuration."""

    # App Settings
    APP_NAME: str = os.getenv("APP_NAME", "DEP Repeater Simulator")
    APP_VERSION: str = os.getenv("APP_VERSION", "0.1.0")
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Apparatus defaults
    DEFAULT_P1: float = float(os.getenv("DEFAULT_P1", "0.99"))
    DEFAULT_ETA: float = float(os.getenv("DEFAULT_ETA", "1.0"))
    DISTANCE_SCALE_KM: float = float(os.getenv("DISTANCE_SCALE_KM", "100"))

    # Experiment Settings
    CSV_SIGNIFICANT_DIGITS: int = int(os.getenv("CSV_SIGNIFICANT_DIGITS", "12"))
    ORACLE_TOLERANCE: float = float(os.getenv("ORACLE_TOLERANCE", "1e-10"))
    MAX_WORKERS: int = int(os.getenv("MAX_WORKERS", "4"))

    # Numerical tolerances (fixed)
    NORMALIZATION_TOL: float = 1e-12
    HERMITICITY_TOL: float = 1e-12
    PSD_TOL: float = 1e-10
    FIXED_POINT_TOL: float = 1e-12
    MIN_SUCCESS_PROBABILITY: float = 1e-15
    THRESHOLD_BRACKET: tuple[float, float] = (1e-6, 1.0 - 1e-6)
    THRESHOLD_XTOL: float = 1e-10
    THRESHOLD_MAX_ITER: int = 200
    THRESHOLD_SCAN_POINTS: int = 512
    MAX_ITERATED_ROUNDS: int = 10_000

    # Oracle-mode chains stay desk-scale
    ORACLE_MAX_SEGMENTS: int = 8


config = Config()
