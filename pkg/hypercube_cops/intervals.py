import math
from typing import Tuple

from scipy import stats

from hypercube_cops.utils import InvalidConfig

CONFIDENCE = 0.95


def wilson_interval(
    wins: int, trials: int, confidence: float = CONFIDENCE
) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    At ``wins == 0`` or ``wins == trials`` the interval is one-sided, with
    the full ``1 - confidence`` mass on the open end.
    """
    if trials < 1:
        error_message = f"An interval needs at least one trial, got {trials}"
        raise InvalidConfig(error_message)
    if not 0 <= wins <= trials:
        error_message = f"Wins {wins} outside 0..{trials}"
        raise InvalidConfig(error_message)

    one_sided = wins in (0, trials)
    tail = 1 - confidence if one_sided else (1 - confidence) / 2
    z = float(stats.norm.ppf(1 - tail))

    p_hat = wins / trials
    z2 = z * z
    centre = (p_hat + z2 / (2 * trials)) / (1 + z2 / trials)
    spread = z * math.sqrt(p_hat * (1 - p_hat) / trials + z2 / (4 * trials**2)) / (1 + z2 / trials)

    low, high = max(0.0, centre - spread), min(1.0, centre + spread)
    if wins == 0:
        return 0.0, high
    if wins == trials:
        return low, 1.0
    return low, high
