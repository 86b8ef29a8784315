"""
Environment-driven defaults for fuzzymetric.
Values are read once at import; a `.env` file in the working directory is honoured.
"""
import os

from dotenv import load_dotenv

from fuzzymetric.exceptions import ConfigError

load_dotenv()


def _positive_float(name: str, default: str) -> float:
    raw = os.getenv(name, default)
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{name} must be a number, got {raw!r}")
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {raw!r}")
    return value


def _positive_int(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{name} must be at least 1, got {raw!r}")
    return value


# Level mesh for the discretised counterexample generators
DEFAULT_MESH = _positive_float("FUZZYMETRIC_MESH", "1e-3")

DEFAULT_EPS = _positive_float("FUZZYMETRIC_EPS", "0.05")

# Maximum number of centres any greedy net may use
DEFAULT_BUDGET = _positive_int("FUZZYMETRIC_BUDGET", "1000")

# Length sampled past the finite end of an unbounded interval when probing it
PROBE_SPAN = _positive_float("FUZZYMETRIC_PROBE_SPAN", "10.0")

FLOAT_TOLERANCE = _positive_float("FUZZYMETRIC_TOLERANCE", "1e-9")

LOG_LEVEL = os.getenv("FUZZYMETRIC_LOG_LEVEL", "WARNING").upper()
