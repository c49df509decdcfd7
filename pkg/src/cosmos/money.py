"""Exact decimal arithmetic for USD amounts and workload quantities.

Monetary values are plain ``decimal.Decimal`` kept exact to 12 fractional
digits. Binary floats are rejected at every entry point so catalog rates like
2e-7 USD per request never pick up representation error. Rounding, when a
result must be quantized, is always half-even.
"""

from __future__ import annotations

import decimal
from decimal import Decimal

from .errors import DomainError

#: Fractional digits carried by every monetary amount.
MONEY_PLACES = 12

MONEY_QUANTUM = Decimal(1).scaleb(-MONEY_PLACES)

#: Working context: enough significant digits that all catalog/workload
#: products stay exact; divisions are correctly rounded at 50 digits.
CONTEXT = decimal.Context(prec=50, rounding=decimal.ROUND_HALF_EVEN)


def dec(value: str | int | Decimal) -> Decimal:
    """Parse a quantity into a finite Decimal, rejecting binary floats."""
    if isinstance(value, float):
        raise DomainError(f"refusing float {value!r}; pass a decimal string")
    if isinstance(value, Decimal):
        result = value
    else:
        try:
            result = Decimal(value)
        except (decimal.InvalidOperation, TypeError, ValueError) as exc:
            raise DomainError(f"not a decimal quantity: {value!r}") from exc
    if not result.is_finite():
        raise DomainError(f"quantity must be finite, got {value!r}")
    return result


def usd(value: str | int | Decimal) -> Decimal:
    """Parse a monetary amount, quantized half-even to 12 fractional digits."""
    return quantize_money(dec(value))


def quantize_money(value: Decimal) -> Decimal:
    """Round a Decimal to the money quantum (half-even)."""
    return CONTEXT.quantize(value, MONEY_QUANTUM)


def exact(*factors: Decimal) -> Decimal:
    """Multiply factors under the high-precision context."""
    out = Decimal(1)
    for f in factors:
        out = CONTEXT.multiply(out, f)
    return out


def money_product(*factors: Decimal) -> Decimal:
    """Multiply factors and quantize the result to the money quantum."""
    return quantize_money(exact(*factors))


def div(a: Decimal, b: Decimal) -> Decimal:
    """Divide under the high-precision context (correctly rounded)."""
    return CONTEXT.divide(a, b)


def fmt(value: Decimal, places: int = 4) -> str:
    """Format for display, rounded half-even to ``places`` decimals."""
    q = Decimal(1).scaleb(-places)
    return str(CONTEXT.quantize(value, q))


def fmt_full(value: Decimal) -> str:
    """Full-precision serialization used in machine-readable outputs."""
    return format(value.normalize(), "f")
