"""Small shared helpers: rounding and hashing."""

import hashlib
from decimal import ROUND_HALF_UP, Decimal


def round_half_up(value: float, decimals: int = 0) -> float:
    """Round with ties going away from zero, e.g. 15.5 -> 16, 75.05 -> 75.1.

    Banker's rounding (the builtin round) would send 15.5 to 16 but 16.5 to
    16; published percentage tables use the away-from-zero convention.
    """
    q = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


def percentage(count: int, total: int, decimals: int = 1) -> float:
    if total == 0:
        raise ZeroDivisionError("percentage of an empty total")
    return round_half_up(100.0 * count / total, decimals)


def short_hash(data: bytes, length: int = 12) -> str:
    """Stable short identifier for model files and corpora."""
    return hashlib.sha256(data).hexdigest()[:length]
