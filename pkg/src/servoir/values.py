"""Typed property values: money, quantities with units, feature sets.

The unit table is fixed and decimal-SI:

- storage: MB, GB, TB (base GB; MB = 10^-3 GB, TB = 10^3 GB)
- time:    ms, s, min, h (base s)
- percent: percent

Money never converts between currencies; mixing currencies is an error at
the point of comparison or summation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from servoir.errors import MixedCurrencyError

# unit -> (dimension, factor to the dimension's base unit)
UNIT_TABLE: dict[str, tuple[str, Decimal]] = {
    "MB": ("storage", Decimal("0.001")),
    "GB": ("storage", Decimal("1")),
    "TB": ("storage", Decimal("1000")),
    "ms": ("time", Decimal("0.001")),
    "s": ("time", Decimal("1")),
    "min": ("time", Decimal("60")),
    "h": ("time", Decimal("3600")),
    "percent": ("percent", Decimal("1")),
}

_CURRENCY_RE = re.compile(r"^[A-Z]{3}$")


def is_unit(word: str) -> bool:
    return word in UNIT_TABLE


def is_currency(word: str) -> bool:
    """ISO-4217 alphabetic code shape: exactly three uppercase letters."""
    return bool(_CURRENCY_RE.match(word))


def frac_digits(d: Decimal) -> int:
    exponent = d.as_tuple().exponent
    return max(0, -int(exponent)) if isinstance(exponent, int) else 0


def format_decimal(d: Decimal) -> str:
    """Shortest plain decimal form: no exponent, no trailing zeros."""
    if d == 0:
        return "0"
    return format(d.normalize(), "f")


@dataclass(frozen=True)
class Money:
    """An exact amount in one ISO-4217 currency, at most 4 fractional digits."""

    amount: Decimal
    currency: str

    def __post_init__(self):
        if not is_currency(self.currency):
            raise ValueError(f"invalid currency code {self.currency!r}")
        if not self.amount.is_finite():
            raise ValueError("money amount must be finite")
        if frac_digits(self.amount) > 4:
            raise ValueError(
                f"money amount {self.amount} has more than 4 fractional digits"
            )

    def __add__(self, other: "Money") -> "Money":
        if other.currency != self.currency:
            raise MixedCurrencyError(
                f"cannot add {other.currency} to {self.currency}"
            )
        return Money(self.amount + other.amount, self.currency)

    def __str__(self) -> str:
        return f"{format_decimal(self.amount)} {self.currency}"


@dataclass(frozen=True)
class Quantity:
    """A finite magnitude in one unit from the fixed unit table."""

    magnitude: Decimal
    unit: str

    def __post_init__(self):
        if self.unit not in UNIT_TABLE:
            raise ValueError(f"unknown unit {self.unit!r}")
        if not self.magnitude.is_finite():
            raise ValueError("quantity magnitude must be finite")

    @property
    def dimension(self) -> str:
        return UNIT_TABLE[self.unit][0]

    def converted_to(self, unit: str) -> "Quantity":
        dimension, factor = UNIT_TABLE[self.unit]
        target_dimension, target_factor = UNIT_TABLE[unit]
        if dimension != target_dimension:
            raise ValueError(
                f"cannot convert {self.unit} ({dimension}) to {unit} ({target_dimension})"
            )
        return Quantity(self.magnitude * factor / target_factor, unit)

    def __str__(self) -> str:
        return f"{format_decimal(self.magnitude)} {self.unit}"


# A property value in a service description. Enum members, strings, rich
# text, and URLs are all plain str (the property type disambiguates);
# feature-set values are frozensets of feature identifiers.
Value = str | bool | int | Decimal | Money | Quantity | frozenset
