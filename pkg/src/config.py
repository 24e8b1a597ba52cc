"""
Configuration and defaults for the mixed-choice session verifier.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()


def _env_int(env_var: str, default: int) -> int:
    """Read a positive integer from an env variable, falling back to default."""
    raw = os.getenv(env_var, "").strip()
    return int(raw) if raw else default


class Config:
    """Central configuration for parsing, checking and model checking."""

    # ── Paths ───────────────────────────────────────────────────────────
    PROJECT_ROOT = Path(__file__).resolve().parent.parent
    CORPUS_DIR = PROJECT_ROOT / "corpus"
    OUTPUT_DIR = PROJECT_ROOT / "outputs"
    DSL_SUFFIX = ".mps"

    # ── Exploration / Checking Bounds ───────────────────────────────────
    MAX_STATES = _env_int("MPS_MAX_STATES", 100_000)
    MAX_QUEUE = _env_int("MPS_MAX_QUEUE", 8)         # per-channel length

    # ── Type Checking ───────────────────────────────────────────────────
    SOUND_MODE = os.getenv("MPS_SOUND_MODE", "false").lower() == "true"
    INFERENCE_STRATEGY = "satisfied-first"            # 'satisfied-first' | 'full-set-only'
    WEIGHT_STRICT = False                             # compare branch terms up to bisimilarity

    # ── Random Generation ───────────────────────────────────────────────
    RANDOM_SEED = _env_int("MPS_SEED", 42)
    FUZZ_MAX_PARTICIPANTS = 4
    FUZZ_MAX_TAGS = 3
    FUZZ_MAX_WIDTH = 3
    FUZZ_MAX_DEPTH = 5
    FUZZ_QUEUE_MESSAGES = 2
    FUZZ_WALK_STEPS = 6

    # ── Logging / Output ────────────────────────────────────────────────
    LOG_LEVEL = os.getenv("MPS_LOG_LEVEL", "INFO").upper()
    SHOW_PROGRESS = os.getenv("MPS_PROGRESS", "false").lower() == "true"

    def __init__(self, **overrides):
        """Allow runtime overrides via keyword arguments."""
        for key, value in overrides.items():
            if hasattr(self, key):
                setattr(self, key, value)
            else:
                raise ValueError(f"Unknown config key: {key}")

    def __repr__(self):
        attrs = {k: getattr(self, k) for k in vars(type(self))
                 if not k.startswith("_") and k.isupper()}
        return f"Config({attrs})"
