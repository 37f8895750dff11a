"""Daily decision procedures for the four agent architectures.

Every ``*_decide`` function reads the world and returns a ``DecisionSet``;
none of them mutate state. The selfish agent's cooldown travels back to
the simulator through ``DecisionSet.cooldown_until``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from .knowledge import (
    DocumentKind,
    KnowledgeBase,
    NoMatch,
    retrieve,
)
from .model import ROLES, ConfigError, Role, WorldState

log = logging.getLogger(__name__)

EMERGENCY_QUERY = "manufacturer stockout emergency order"
DEFAULT_TARGET_MULTIPLIER = 2
DEFAULT_COOLDOWN_DAYS = 10


class PolicyKind(str, enum.Enum):
    STATIC_BASELINE = "static-baseline"
    SELFISH_RAG = "selfish-rag"
    HOARDING_VMI = "hoarding-vmi"
    COLLABORATIVE_VMI = "collaborative-vmi"

    @classmethod
    def parse(cls, value: str | PolicyKind) -> PolicyKind:
        if isinstance(value, PolicyKind):
            return value
        try:
            return cls(str(value).strip().lower().replace("_", "-"))
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ConfigError(f"unknown policy {value!r} (expected one of: {names})") from None

    @property
    def uses_sga_targets(self) -> bool:
        return self in (PolicyKind.HOARDING_VMI, PolicyKind.COLLABORATIVE_VMI)


class PolicySource(str, enum.Enum):
    FIXED = "fixed"
    SGA_AT_T0 = "sga-at-t0"


@dataclass(frozen=True)
class DecisionSet:
    replenishment_orders: list[tuple[Role, int]] = field(default_factory=list)
    push_shipments: list[tuple[Role, Role, int]] = field(default_factory=list)
    cooldown_until: int | None = None

    def __post_init__(self) -> None:
        if any(q < 0 for _, q in self.replenishment_orders):
            raise ValueError("order quantities must be non-negative")
        if any(q < 0 for _, _, q in self.push_shipments):
            raise ValueError("push quantities must be non-negative")

    def order_for(self, role: Role) -> int:
        return sum(q for r, q in self.replenishment_orders if r is role)


def baseline_decide(world: WorldState) -> DecisionSet:
    orders = []
    for role in ROLES:
        entity = world.entity(role)
        orders.append((role, max(0, entity.out_level - entity.inventory_position)))
    return DecisionSet(orders)


def selfish_decide(world: WorldState, kb: KnowledgeBase | None,
                   cooldown_until: int) -> DecisionSet:
    """Baseline ordering plus a reactive emergency order at the Manufacturer.

    The emergency fires when the Manufacturer is empty while owing the
    Retailer, and no earlier emergency is still cooling down. Its size and
    cooldown come from the retrieved reactive document.
    """
    base = baseline_decide(world)
    m = world.entity(Role.MANUFACTURER)
    if not (m.on_hand == 0 and m.backorders > 0 and world.day >= cooldown_until):
        return base
    if kb is None:
        log.warning("day %d: no reactive knowledge base; using baseline order", world.day)
        return base
    try:
        doc = retrieve(kb, EMERGENCY_QUERY, DocumentKind.POLICY)
    except NoMatch:
        log.warning("day %d: no emergency document retrieved; using baseline order", world.day)
        return base

    multiplier = doc.parameters.get("target_multiplier", DEFAULT_TARGET_MULTIPLIER)
    cooldown = int(doc.parameters.get("cooldown_days", DEFAULT_COOLDOWN_DAYS))
    target = int(multiplier * m.out_level)
    orders = [
        (role, max(0, target - m.inventory_position)) if role is Role.MANUFACTURER else (role, q)
        for role, q in base.replenishment_orders
    ]
    decision = DecisionSet(orders, cooldown_until=world.day + cooldown)
    log.debug("day %d: emergency order %d via %s", world.day,
              decision.order_for(Role.MANUFACTURER), doc.name)
    return decision


def system_position(world: WorldState) -> int:
    """Manufacturer plus Retailer position, counting units the Supplier still owes.

    The owed units are already committed; leaving them out makes the
    coordinator re-order the same shortfall every day the Supplier is dry.
    """
    m = world.entity(Role.MANUFACTURER)
    r = world.entity(Role.RETAILER)
    owed = world.entity(Role.SUPPLIER).backorders
    return m.inventory_position + r.inventory_position + owed


def _consolidated_order(world: WorldState) -> int:
    m = world.entity(Role.MANUFACTURER)
    r = world.entity(Role.RETAILER)
    return max(0, m.out_level + r.out_level - system_position(world))


def _supplier_order(world: WorldState) -> tuple[Role, int]:
    s = world.entity(Role.SUPPLIER)
    return (Role.SUPPLIER, max(0, s.out_level - s.inventory_position))


def hoarding_vmi_decide(world: WorldState) -> DecisionSet:
    # Deliberately flawed: the Manufacturer orders for the whole chain but
    # never moves stock to the Retailer.
    return DecisionSet([
        _supplier_order(world),
        (Role.MANUFACTURER, _consolidated_order(world)),
    ])


def collaborative_vmi_decide(world: WorldState) -> DecisionSet:
    m = world.entity(Role.MANUFACTURER)
    r = world.entity(Role.RETAILER)
    push = min(m.on_hand, max(0, r.out_level - r.inventory_position))
    pushes = [(Role.MANUFACTURER, Role.RETAILER, push)] if push > 0 else []
    return DecisionSet(
        [_supplier_order(world), (Role.MANUFACTURER, _consolidated_order(world))],
        pushes,
    )


def sga_set_policies(kb: KnowledgeBase) -> dict[Role, int]:
    targets = {}
    for role in ROLES:
        try:
            doc = retrieve(kb, role.value, DocumentKind.POLICY)
        except NoMatch:
            raise ConfigError(f"no policy document matches {role.value}") from None
        if "order_up_to_level" not in doc.parameters:
            raise ConfigError(f"{doc.name} has no order_up_to_level")
        targets[role] = int(doc.parameters["order_up_to_level"])
    return targets


@dataclass(frozen=True)
class PolicyVariant:
    kind: PolicyKind
    source: PolicySource = PolicySource.FIXED
    reactive_kb: KnowledgeBase | None = None

    def __post_init__(self) -> None:
        if self.kind.uses_sga_targets and self.source is not PolicySource.SGA_AT_T0:
            raise ConfigError(f"{self.kind.value} requires targets set from the knowledge base at t=0")

    @classmethod
    def named(cls, name: str | PolicyKind,
              reactive_kb: KnowledgeBase | None = None) -> PolicyVariant:
        kind = PolicyKind.parse(name)
        source = PolicySource.SGA_AT_T0 if kind.uses_sga_targets else PolicySource.FIXED
        return cls(kind, source, reactive_kb if kind is PolicyKind.SELFISH_RAG else None)

    def decide(self, world: WorldState) -> DecisionSet:
        if self.kind is PolicyKind.STATIC_BASELINE:
            return baseline_decide(world)
        if self.kind is PolicyKind.SELFISH_RAG:
            return selfish_decide(world, self.reactive_kb, world.emergency_cooldown_until)
        if self.kind is PolicyKind.HOARDING_VMI:
            return hoarding_vmi_decide(world)
        return collaborative_vmi_decide(world)
