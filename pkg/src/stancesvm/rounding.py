"""Percentage rendering with an explicit rounding mode."""

from decimal import ROUND_HALF_EVEN, ROUND_HALF_UP, Decimal

ROUNDING_MODES = {"half-up": ROUND_HALF_UP, "half-even": ROUND_HALF_EVEN}


def round_decimal(value: float, digits: int = 1, mode: str = "half-up") -> Decimal:
    """Round ``value`` to ``digits`` decimals.

    The float is first snapped to 10 decimals so that binary noise such as
    ``82.45000000000000284`` or ``80.64999999999999`` rounds like the
    decimal literal it came from.
    """
    try:
        rounding = ROUNDING_MODES[mode]
    except KeyError:
        raise ValueError(f"unknown rounding mode {mode!r}") from None
    snapped = Decimal(f"{value:.10f}")
    return snapped.quantize(Decimal(1).scaleb(-digits), rounding=rounding)


def format_percent(fraction: float, digits: int = 1, mode: str = "half-up") -> str:
    """Render a fraction in [0, 1] as a percentage string without the sign."""
    return str(round_decimal(fraction * 100.0, digits, mode))
