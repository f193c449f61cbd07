"""Global numeric configuration.

A single tolerance (default 1e-9) governs every membership, feasibility and
residual decision. It can be overridden per call, or globally through the
CONELAB_TOLERANCE environment variable.
"""
import os

DEFAULT_TOLERANCE = 1e-9

# Double-description enumeration aborts beyond this many intermediate rays.
DEFAULT_GENERATOR_BUDGET = 10_000

# Sample count for checks on non-polyhedral (psd) cones.
DEFAULT_PSD_SAMPLES = 200


def get_tolerance(override: float | None = None) -> float:
    """Resolve the effective tolerance: explicit override > env var > default."""
    if override is not None:
        if override < 0:
            raise ValueError("tolerance must be nonnegative")
        return float(override)
    env = os.environ.get("CONELAB_TOLERANCE")
    if env is not None:
        return float(env)
    return DEFAULT_TOLERANCE
