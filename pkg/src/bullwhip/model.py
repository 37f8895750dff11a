"""Domain types for the three-echelon chain."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Raised for invalid run configuration (unknown names, bad values)."""


class Role(str, enum.Enum):
    SUPPLIER = "Supplier"
    MANUFACTURER = "Manufacturer"
    RETAILER = "Retailer"

    @classmethod
    def parse(cls, value: str | Role) -> Role:
        if isinstance(value, Role):
            return value
        for role in cls:
            if role.value.lower() == str(value).lower():
                return role
        raise ConfigError(f"unknown role: {value!r}")


# upstream-first order; used wherever iteration order must be deterministic
ROLES: tuple[Role, ...] = (Role.SUPPLIER, Role.MANUFACTURER, Role.RETAILER)

UPSTREAM: dict[Role, Role] = {
    Role.RETAILER: Role.MANUFACTURER,
    Role.MANUFACTURER: Role.SUPPLIER,
}
DOWNSTREAM: dict[Role, Role] = {v: k for k, v in UPSTREAM.items()}


@dataclass
class EntityState:
    role: Role
    on_hand: int = 0
    backorders: int = 0
    on_order: int = 0
    out_level: int = 0
    production_capacity: int | None = None

    @property
    def inventory_position(self) -> int:
        return self.on_hand + self.on_order - self.backorders


@dataclass(frozen=True)
class Shipment:
    origin: Role
    destination: Role
    quantity: int
    dispatch_day: int
    arrival_day: int
    premium_applied: float = 0.0

    def __post_init__(self) -> None:
        if self.quantity <= 0:
            raise ValueError("shipment quantity must be positive")
        if self.arrival_day < self.dispatch_day + 1:
            raise ValueError("shipment must take at least one day")

    @property
    def is_production(self) -> bool:
        return self.origin is self.destination


@dataclass(frozen=True)
class DemandModel:
    """Customer demand at the Retailer.

    ``deterministic`` replaces the Poisson draw with ``round(rate)``; it
    exists for steady-state checks and is never the default.
    """

    base_rate: float = 10.0
    surge_multiplier: float = 1.5
    surge_window: tuple[int, int] | None = None
    deterministic: bool = False

    def __post_init__(self) -> None:
        if self.base_rate < 0 or self.surge_multiplier < 0:
            raise ConfigError("demand rates must be non-negative")

    def rate(self, day: int) -> float:
        if self.surge_window is not None:
            start, end = self.surge_window
            if start <= day < end:
                return self.base_rate * self.surge_multiplier
        return self.base_rate


class DisruptionKind(str, enum.Enum):
    SUPPLIER_FAILURE = "supplier_failure"
    TRANSPORT_DISRUPTION = "transport_disruption"
    DEMAND_SURGE = "demand_surge"
    QUALITY_FAILURE = "quality_failure"
    NONE = "none"

    @classmethod
    def parse(cls, value: str | DisruptionKind) -> DisruptionKind:
        if isinstance(value, DisruptionKind):
            return value
        key = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"transport": cls.TRANSPORT_DISRUPTION, "surge": cls.DEMAND_SURGE}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown scenario kind: {value!r}") from None


# (duration_days, magnitude) per kind
SCENARIO_DEFAULTS: dict[DisruptionKind, tuple[int, float]] = {
    DisruptionKind.SUPPLIER_FAILURE: (20, 2.0),
    DisruptionKind.TRANSPORT_DISRUPTION: (15, 4),
    DisruptionKind.DEMAND_SURGE: (20, 1.5),
    DisruptionKind.QUALITY_FAILURE: (1, 0.7),
    DisruptionKind.NONE: (0, 0.0),
}


@dataclass(frozen=True)
class DisruptionScenario:
    kind: DisruptionKind = DisruptionKind.NONE
    start_day: int = 60
    duration_days: int = 0
    magnitude: float = 0.0

    @classmethod
    def of(
        cls,
        kind: str | DisruptionKind,
        start_day: int = 60,
        duration_days: int | None = None,
        magnitude: float | None = None,
    ) -> DisruptionScenario:
        kind = DisruptionKind.parse(kind)
        default_duration, default_magnitude = SCENARIO_DEFAULTS[kind]
        return cls(
            kind=kind,
            start_day=start_day,
            duration_days=default_duration if duration_days is None else duration_days,
            magnitude=default_magnitude if magnitude is None else magnitude,
        )

    @property
    def window(self) -> tuple[int, int]:
        return (self.start_day, self.start_day + self.duration_days)

    def active(self, day: int) -> bool:
        start, end = self.window
        return start <= day < end


@dataclass(frozen=True)
class CostParameters:
    holding_rate: dict[Role, float] = field(
        default_factory=lambda: {role: 1.0 for role in ROLES}
    )
    backorder_penalty: float = 10.0
    premium_per_shipment: float = 0.0

    def __post_init__(self) -> None:
        if any(rate < 0 for rate in self.holding_rate.values()):
            raise ConfigError("holding rates must be non-negative")
        if self.backorder_penalty < 0 or self.premium_per_shipment < 0:
            raise ConfigError("cost rates must be non-negative")

    @classmethod
    def zero(cls) -> CostParameters:
        return cls({role: 0.0 for role in ROLES}, 0.0, 0.0)


@dataclass(frozen=True)
class StrategyParameters:
    extra_lead_time: int = 0
    transport_cost_premium: float = 0


@dataclass(frozen=True)
class ChainParameters:
    """Physical layout of the chain: lead times, capacity, opening stock.

    ``baseline_out_levels`` are the human-fixed targets used by the
    non-collaborative policies; the collaborative variants replace them
    with knowledge-base targets at t=0. ``initial_on_hand`` is the
    opening stock of every run regardless of policy; when unset it equals
    the baseline levels.
    """

    supplier_to_manufacturer_lead: int = 4
    manufacturer_to_retailer_lead: int = 2
    production_lead: int = 2
    production_capacity: int = 20
    # expected demand over each entity's replenishment lead, no safety stock
    baseline_out_levels: dict[Role, int] = field(
        default_factory=lambda: {
            Role.SUPPLIER: 20,
            Role.MANUFACTURER: 40,
            Role.RETAILER: 20,
        }
    )
    initial_on_hand: dict[Role, int] | None = None

    def __post_init__(self) -> None:
        if min(self.supplier_to_manufacturer_lead, self.manufacturer_to_retailer_lead,
               self.production_lead) < 1:
            raise ConfigError("lead times must be at least one day")
        if self.production_capacity < 0:
            raise ConfigError("production capacity must be non-negative")

    def lead(self, origin: Role, destination: Role) -> int:
        if origin is Role.SUPPLIER and destination is Role.MANUFACTURER:
            return self.supplier_to_manufacturer_lead
        if origin is Role.MANUFACTURER and destination is Role.RETAILER:
            return self.manufacturer_to_retailer_lead
        if origin is destination is Role.SUPPLIER:
            return self.production_lead
        raise ConfigError(f"no lane {origin.value} -> {destination.value}")


@dataclass(frozen=True)
class Modifiers:
    production_lead_multiplier: float = 1.0
    extra_lead_days: int = 0
    demand_multiplier: float = 1.0
    wiped: int = 0

    @property
    def empty(self) -> bool:
        return self == Modifiers()


@dataclass
class Ledger:
    holding: float = 0.0
    backorder: float = 0.0
    premium: float = 0.0
    holding_by_role: dict[Role, float] = field(
        default_factory=lambda: {role: 0.0 for role in ROLES}
    )


@dataclass(frozen=True)
class DayRecord:
    """One row of the trace: one entity on one day (closing values)."""

    day: int
    entity: Role
    on_hand: int
    backorders: int
    on_order: int
    demand: int
    fulfilled: int
    holding_cost: float
    backorder_cost: float
    premium_cost: float
    # bookkeeping kept in memory only; not part of the CSV columns
    received: int = 0
    produced: int = 0
    wiped: int = 0
    ordered: int = 0
    position_at_decision: int = 0
    out_level: int = 0


@dataclass
class WorldState:
    day: int
    horizon: int
    entities: dict[Role, EntityState]
    chain: ChainParameters
    demand_model: DemandModel
    rng: np.random.Generator
    in_transit: list[Shipment] = field(default_factory=list)
    ledger: Ledger = field(default_factory=Ledger)
    total_demand: int = 0
    total_fulfilled: int = 0
    active_modifiers: Modifiers = field(default_factory=Modifiers)
    # strategy override in force during [start, end)
    strategy: StrategyParameters | None = None
    strategy_window: tuple[int, int] | None = None
    emergency_cooldown_until: int = 0
    # cumulative flow tallies for conservation checks
    initial_stock: int = 0
    total_produced: int = 0
    total_wiped: int = 0

    def entity(self, role: Role) -> EntityState:
        return self.entities[role]

    def in_transit_to(self, role: Role) -> int:
        return sum(s.quantity for s in self.in_transit if s.destination is role)

    def strategy_active(self, day: int | None = None) -> bool:
        if self.strategy is None or self.strategy_window is None:
            return False
        day = self.day if day is None else day
        start, end = self.strategy_window
        return start <= day < end


@dataclass(frozen=True)
class KpiReport:
    total_cost: float
    holding_cost: float
    backorder_cost: float
    premium_cost: float
    service_level: float
    total_demand: int
    total_fulfilled: int
    holding_by_role: dict[Role, float]

    @classmethod
    def from_world(cls, world: WorldState) -> KpiReport:
        ledger = world.ledger
        if world.total_demand:
            service = 100.0 * world.total_fulfilled / world.total_demand
        else:
            service = 0.0
        return cls(
            total_cost=ledger.holding + ledger.backorder + ledger.premium,
            holding_cost=ledger.holding,
            backorder_cost=ledger.backorder,
            premium_cost=ledger.premium,
            service_level=service,
            total_demand=world.total_demand,
            total_fulfilled=world.total_fulfilled,
            holding_by_role=dict(ledger.holding_by_role),
        )
