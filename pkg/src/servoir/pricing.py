"""Price components and usage-based cost quotes.

All arithmetic is exact decimal; banker's rounding to 4 fractional digits
happens once, at line-item level. Documented constants:

- an hourly fixed component bills 730 hours per month;
- a yearly fixed component bills horizon_months / 12 periods (pro-rated);
- per-unit components bill max(0, monthly_quantity - included) each month,
  flat or via a tier schedule, times the horizon in months. The declared
  period of a per-unit component is the metering cadence and does not scale
  the cost (usage profiles are stated per month).

Tier schedules have inclusive cumulative upper bounds, the last one open
(infinity). The included quota consumes lowest-band capacity before billing
begins. In graduated mode every band prices its own units; in volume mode
the band containing the total monthly quantity prices all billable units.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext

from servoir.errors import MixedCurrencyError
from servoir.values import Money, format_decimal

HOURS_PER_MONTH = 730
MONTHS_PER_YEAR = 12

PERIODS = ("hour", "month", "year")
TIER_MODES = ("graduated", "volume")

_CENT4 = Decimal("0.0001")

# Zero-component quotes have no currency of their own; ISO 4217 reserves
# XXX for "no currency".
NO_CURRENCY = "XXX"


@dataclass(frozen=True)
class TierSchedule:
    """Ordered price bands over cumulative monthly quantity.

    ``bands`` pairs an inclusive upper bound (None = infinity, last band
    only) with the unit price charged for quantity in that band.
    """

    mode: str
    bands: tuple[tuple[Decimal | None, Money], ...]

    def __post_init__(self):
        if self.mode not in TIER_MODES:
            raise ValueError(f"unknown tier mode {self.mode!r}")
        if not self.bands:
            raise ValueError("tier schedule needs at least one band")
        if self.bands[-1][0] is not None:
            raise ValueError("last tier band must be unbounded")
        previous = None
        for upper, _price in self.bands[:-1]:
            if upper is None:
                raise ValueError("only the last tier band may be unbounded")
            if previous is not None and upper <= previous:
                raise ValueError("tier bounds must be strictly increasing")
            previous = upper

    @property
    def currency(self) -> str:
        return self.bands[0][1].currency


@dataclass(frozen=True)
class PriceComponent:
    """One price component: fixed, one_time, or per_unit."""

    kind: str
    amount: Money
    period: str | None = None  # absent for one_time
    metric: str | None = None  # per_unit only
    included: Decimal = Decimal(0)  # per_unit only
    tiers: TierSchedule | None = None  # per_unit only
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("fixed", "per_unit", "one_time"):
            raise ValueError(f"unknown price component kind {self.kind!r}")
        if self.amount.amount < 0:
            raise ValueError("price amounts must be >= 0")
        if self.included < 0:
            raise ValueError("included quantity must be >= 0")
        if self.kind == "one_time":
            if self.period is not None:
                raise ValueError("one_time components have no period")
        else:
            if self.period not in PERIODS:
                raise ValueError(f"invalid period {self.period!r}")
        if self.kind == "per_unit":
            if not self.metric:
                raise ValueError("per_unit components need a metric")
            if self.tiers is not None and self.tiers.currency != self.amount.currency:
                raise MixedCurrencyError(
                    "tier band currency differs from component currency"
                )

    @property
    def currency(self) -> str:
        return self.amount.currency

    def label(self) -> str:
        """Stable human-readable reference used in quote line items."""
        if self.kind == "fixed":
            return f"fixed {self.amount} per {self.period}"
        if self.kind == "one_time":
            return f"one_time {self.amount}"
        return f"per_unit {self.metric} {self.amount} per {self.period}"


@dataclass(frozen=True)
class UsageProfile:
    """Planned consumption: a horizon in months and per-month metric values."""

    horizon_months: int
    metrics: dict[str, Decimal] = field(default_factory=dict)

    def __post_init__(self):
        if self.horizon_months < 1:
            raise ValueError("horizon must be at least one month")
        for name, quantity in self.metrics.items():
            if not quantity.is_finite() or quantity < 0:
                raise ValueError(f"usage for {name!r} must be finite and >= 0")


@dataclass(frozen=True)
class LineItem:
    component: str
    billed_quantity: Decimal
    cost: Money


@dataclass(frozen=True)
class PriceQuote:
    total: Money
    line_items: tuple[LineItem, ...]

    def to_json(self) -> dict:
        return {
            "total": {"amount": self.total.amount, "currency": self.total.currency},
            "line_items": [
                {
                    "component": item.component,
                    "billed_quantity": item.billed_quantity,
                    "cost": {
                        "amount": item.cost.amount,
                        "currency": item.cost.currency,
                    },
                }
                for item in self.line_items
            ],
        }


def tier_cost(schedule: TierSchedule, quantity: Decimal, included: Decimal) -> Decimal:
    """Exact monthly cost of ``quantity`` units under a tier schedule.

    ``quantity`` is the total monthly quantity; the first ``included`` units
    occupy band capacity free of charge.
    """
    if quantity <= 0:
        return Decimal(0)
    if schedule.mode == "graduated":
        total = Decimal(0)
        previous = Decimal(0)
        remaining_free = included
        for upper, price in schedule.bands:
            band_top = quantity if upper is None else min(quantity, upper)
            in_band = band_top - previous
            if in_band <= 0:
                continue
            free = min(remaining_free, in_band)
            remaining_free -= free
            total += (in_band - free) * price.amount
            previous = band_top
            if band_top == quantity:
                break
        return total
    # volume: the band containing the total prices all billable units
    billable = max(Decimal(0), quantity - included)
    for upper, price in schedule.bands:
        if upper is None or quantity <= upper:
            return billable * price.amount
    raise AssertionError("unreachable: last band is unbounded")


def _round_line(amount: Decimal) -> Decimal:
    return amount.quantize(_CENT4, rounding=ROUND_HALF_EVEN)


def component_cost(component: PriceComponent, usage: UsageProfile) -> Money:
    """Cost of one component over the usage horizon (rounded line item)."""
    return _line_item(component, usage).cost


def _line_item(component: PriceComponent, usage: UsageProfile) -> LineItem:
    horizon = Decimal(usage.horizon_months)
    with localcontext() as ctx:
        ctx.prec = 34
        if component.kind == "one_time":
            periods = Decimal(1)
            cost = component.amount.amount
        elif component.kind == "fixed":
            if component.period == "hour":
                periods = HOURS_PER_MONTH * horizon
            elif component.period == "month":
                periods = horizon
            else:  # year, pro-rated
                periods = horizon / MONTHS_PER_YEAR
            cost = component.amount.amount * periods
        else:  # per_unit
            monthly = usage.metrics.get(component.metric or "", Decimal(0))
            billable = max(Decimal(0), monthly - component.included)
            if component.tiers is not None:
                monthly_cost = tier_cost(component.tiers, monthly, component.included)
            else:
                monthly_cost = billable * component.amount.amount
            periods = billable * horizon
            cost = monthly_cost * horizon
        return LineItem(
            component=component.label(),
            billed_quantity=_round_line(periods),
            cost=Money(_round_line(cost), component.currency),
        )


def quote(
    components: list[PriceComponent] | tuple[PriceComponent, ...],
    usage: UsageProfile,
) -> PriceQuote:
    """Itemized quote over all components; exact sum of rounded line items."""
    currencies = {c.currency for c in components}
    if len(currencies) > 1:
        raise MixedCurrencyError(
            f"variant mixes currencies: {', '.join(sorted(currencies))}"
        )
    items = tuple(_line_item(c, usage) for c in components)
    if not items:
        return PriceQuote(total=Money(Decimal(0), NO_CURRENCY), line_items=())
    currency = currencies.pop()
    total = Decimal(0)
    for item in items:
        total += item.cost.amount
    return PriceQuote(total=Money(total, currency), line_items=items)


def describe_money(m: Money) -> str:
    return f"{format_decimal(m.amount)} {m.currency}"
