"""Daily-tick simulation of the Supplier -> Manufacturer -> Retailer chain.

Each day runs the same fixed sequence:

1. receive shipments due today
2. apply disruption modifiers (and the one-off quality wipe)
3. draw customer demand at the Retailer and fill it, backlog first
4. upstream entities ship what they still owe downstream
5. ask the policy for orders and pushes
6. dispatch pushes and today's orders
7. start Supplier production, up to capacity
8. charge holding on closing stock and the penalty on customer backlog

Production jobs are modelled as shipments from the Supplier to itself so
that every entity's ``on_order`` is simply the sum of what is in transit
towards it.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import RunConfig
from .knowledge import KnowledgeBase
from .model import (
    DOWNSTREAM,
    ROLES,
    UPSTREAM,
    ConfigError,
    CostParameters,
    DayRecord,
    DemandModel,
    DisruptionKind,
    DisruptionScenario,
    EntityState,
    KpiReport,
    Ledger,
    Modifiers,
    Role,
    Shipment,
    WorldState,
)
from .policies import PolicyKind, PolicyVariant, sga_set_policies

# above this rate exp(-rate) underflows and sequential inversion stalls
_INVERSION_LIMIT = 600.0


@dataclass(frozen=True)
class FulfillmentResult:
    filled: int
    new_backorders: int


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def poisson_inversion(rng: np.random.Generator, rate: float) -> int:
    """Poisson draw by inversion with sequential search (one uniform per draw)."""
    if rate <= 0:
        return 0
    if rate > _INVERSION_LIMIT:
        return int(rng.poisson(rate))
    u = rng.random()
    k = 0
    p = math.exp(-rate)
    cdf = p
    while u > cdf:
        k += 1
        p *= rate / k
        if p == 0.0:
            break
        cdf += p
    return k


def sample_demand(rng: np.random.Generator, day: int, demand_model: DemandModel) -> int:
    rate = demand_model.rate(day)
    if demand_model.deterministic:
        return int(round(rate))
    return poisson_inversion(rng, rate)


def inventory_position(entity: EntityState) -> int:
    return entity.on_hand + entity.on_order - entity.backorders


def fulfill_demand(entity: EntityState, demand: int) -> FulfillmentResult:
    """Serve outstanding backlog first, then today's demand, from stock."""
    if demand < 0:
        raise ValueError("demand must be non-negative")
    owed = entity.backorders + demand
    filled = min(entity.on_hand, owed)
    entity.on_hand -= filled
    entity.backorders = owed - filled
    return FulfillmentResult(filled, entity.backorders)


def disruption_modifiers(scenario: DisruptionScenario, day: int,
                         world: WorldState) -> Modifiers:
    """Modifiers in force on ``day``; applies the quality wipe as a side effect."""
    kind = scenario.kind
    if not isinstance(kind, DisruptionKind):
        raise ConfigError(f"unknown scenario kind: {kind!r}")

    extra = 0
    if world.strategy_active(day):
        # a chosen mitigation replaces the disruption's own delay
        extra = world.strategy.extra_lead_time
    elif kind is DisruptionKind.TRANSPORT_DISRUPTION and scenario.active(day):
        extra = int(scenario.magnitude)

    if kind is DisruptionKind.NONE or day < scenario.start_day:
        return Modifiers(extra_lead_days=extra)
    if kind is DisruptionKind.SUPPLIER_FAILURE and scenario.active(day):
        return Modifiers(production_lead_multiplier=scenario.magnitude, extra_lead_days=extra)
    if kind is DisruptionKind.DEMAND_SURGE and scenario.active(day):
        return Modifiers(demand_multiplier=scenario.magnitude, extra_lead_days=extra)
    if kind is DisruptionKind.QUALITY_FAILURE and day == scenario.start_day:
        m = world.entity(Role.MANUFACTURER)
        # exact decimal arithmetic: 0.7 * 150 must be 105, not 104.999...
        lost = math.floor(m.on_hand * Fraction(str(scenario.magnitude)))
        m.on_hand -= lost
        world.total_wiped += lost
        return Modifiers(wiped=lost, extra_lead_days=extra)
    return Modifiers(extra_lead_days=extra)


def dispatch(world: WorldState, origin: Role, destination: Role, quantity: int,
             premium: float = 0.0) -> Shipment | None:
    """Ship up to ``quantity`` from ``origin`` stock; None if nothing ships.

    ``premium`` is the per-shipment surcharge; it is charged only on
    Manufacturer-bound shipments while a strategy window is open.
    """
    if quantity <= 0:
        raise ValueError("dispatch quantity must be positive")
    source = world.entity(origin)
    shipped = min(quantity, source.on_hand)
    if shipped == 0:
        return None
    lead = world.chain.lead(origin, destination)
    if destination is Role.MANUFACTURER:
        lead += world.active_modifiers.extra_lead_days
    charged = 0.0
    if premium > 0 and destination is Role.MANUFACTURER and world.strategy_active():
        charged = premium
        world.ledger.premium += premium
    shipment = Shipment(origin, destination, shipped, world.day, world.day + lead, charged)
    source.on_hand -= shipped
    world.entity(destination).on_order += shipped
    world.in_transit.append(shipment)
    return shipment


def _serve_backlog(world: WorldState, origin: Role, premium: float) -> int:
    """Ship what ``origin`` owes its downstream neighbour, as far as stock allows."""
    entity = world.entity(origin)
    owed = min(entity.backorders, entity.on_hand)
    if owed <= 0:
        return 0
    shipment = dispatch(world, origin, DOWNSTREAM[origin], owed, premium)
    entity.backorders -= shipment.quantity
    return shipment.quantity


def _start_production(world: WorldState, requested: int) -> int:
    supplier = world.entity(Role.SUPPLIER)
    capacity = supplier.production_capacity
    started = requested if capacity is None else min(requested, capacity)
    if started <= 0:
        return 0
    lead = world.chain.production_lead * world.active_modifiers.production_lead_multiplier
    lead = max(1, int(round(lead)))
    world.in_transit.append(
        Shipment(Role.SUPPLIER, Role.SUPPLIER, started, world.day, world.day + lead)
    )
    supplier.on_order += started
    world.total_produced += started
    return started


def step_day(world: WorldState, policy: PolicyVariant, scenario: DisruptionScenario,
             costs: CostParameters) -> list[DayRecord]:
    """Advance ``world`` by one day in place; returns that day's per-entity records."""
    if world.day >= world.horizon:
        raise ValueError("simulation horizon already reached")
    day = world.day
    demand = defaultdict(int)
    fulfilled = defaultdict(int)
    received = defaultdict(int)
    premium_before = world.ledger.premium

    # 1. arrivals
    still_moving = []
    for shipment in world.in_transit:
        if shipment.arrival_day == day:
            dest = world.entity(shipment.destination)
            dest.on_hand += shipment.quantity
            dest.on_order -= shipment.quantity
            received[shipment.destination] += shipment.quantity
        else:
            still_moving.append(shipment)
    world.in_transit = still_moving

    # 2. disruptions
    world.active_modifiers = disruption_modifiers(scenario, day, world)

    # 3. customer demand
    retailer = world.entity(Role.RETAILER)
    customer_demand = sample_demand(world.rng, day, world.demand_model)
    result = fulfill_demand(retailer, customer_demand)
    world.total_demand += customer_demand
    world.total_fulfilled += result.filled
    demand[Role.RETAILER] = customer_demand
    fulfilled[Role.RETAILER] = result.filled

    # 4. outstanding downstream orders
    for origin in (Role.MANUFACTURER, Role.SUPPLIER):
        fulfilled[origin] += _serve_backlog(world, origin, costs.premium_per_shipment)

    # 5. decisions
    positions = {role: world.entity(role).inventory_position for role in ROLES}
    decision = policy.decide(world)
    if decision.cooldown_until is not None:
        world.emergency_cooldown_until = decision.cooldown_until

    # 6. pushes, then today's orders
    for origin, destination, quantity in decision.push_shipments:
        if quantity > 0:
            shipment = dispatch(world, origin, destination, quantity, costs.premium_per_shipment)
            if shipment is not None:
                fulfilled[origin] += shipment.quantity
    for role, quantity in decision.replenishment_orders:
        if role is Role.SUPPLIER or quantity <= 0:
            continue
        upstream = UPSTREAM[role]
        world.entity(upstream).backorders += quantity
        demand[upstream] += quantity
        fulfilled[upstream] += _serve_backlog(world, upstream, costs.premium_per_shipment)

    # 7. production
    produced = _start_production(world, decision.order_for(Role.SUPPLIER))

    # 8. costs
    records = []
    for role in ROLES:
        entity = world.entity(role)
        holding = costs.holding_rate.get(role, 0.0) * entity.on_hand
        backorder = costs.backorder_penalty * entity.backorders if role is Role.RETAILER else 0.0
        premium = world.ledger.premium - premium_before if role is Role.MANUFACTURER else 0.0
        world.ledger.holding += holding
        world.ledger.holding_by_role[role] += holding
        world.ledger.backorder += backorder
        records.append(DayRecord(
            day=day,
            entity=role,
            on_hand=entity.on_hand,
            backorders=entity.backorders,
            on_order=entity.on_order,
            demand=demand[role],
            fulfilled=fulfilled[role],
            holding_cost=holding,
            backorder_cost=backorder,
            premium_cost=premium,
            received=received[role],
            produced=produced if role is Role.SUPPLIER else 0,
            wiped=world.active_modifiers.wiped if role is Role.MANUFACTURER else 0,
            ordered=decision.order_for(role),
            position_at_decision=positions[role],
            out_level=entity.out_level,
        ))
    world.day += 1
    return records


def build_policy(config: RunConfig) -> PolicyVariant:
    kind = PolicyKind.parse(config.policy)
    reactive = None
    if kind is PolicyKind.SELFISH_RAG:
        reactive = KnowledgeBase.load(config.kb_paths.reactive)
    return PolicyVariant.named(kind, reactive)


def resolve_targets(config: RunConfig, policy: PolicyVariant) -> dict[Role, int]:
    if policy.kind.uses_sga_targets:
        return sga_set_policies(KnowledgeBase.load(config.kb_paths.policies))
    return dict(config.chain.baseline_out_levels)


def initial_world(config: RunConfig, targets: dict[Role, int]) -> WorldState:
    chain = config.chain
    opening = chain.initial_on_hand or chain.baseline_out_levels
    entities = {
        role: EntityState(
            role=role,
            on_hand=int(opening.get(role, 0)),
            out_level=int(targets[role]),
            production_capacity=chain.production_capacity if role is Role.SUPPLIER else None,
        )
        for role in ROLES
    }
    demand = config.demand
    scenario = config.scenario
    if scenario.kind is DisruptionKind.DEMAND_SURGE:
        demand = DemandModel(demand.base_rate, scenario.magnitude, scenario.window,
                             demand.deterministic)
    world = WorldState(
        day=0,
        horizon=config.horizon,
        entities=entities,
        chain=chain,
        demand_model=demand,
        rng=make_rng(config.base_seed),
        ledger=Ledger(),
        initial_stock=sum(e.on_hand for e in entities.values()),
    )
    if config.strategy_override is not None:
        start, end = scenario.window
        if config.strategy_window_end is not None:
            end = config.strategy_window_end
        world.strategy = config.strategy_override
        world.strategy_window = (start, end)
    return world


def simulate(config: RunConfig) -> tuple[WorldState, list[DayRecord], KpiReport]:
    """Like ``run_simulation`` but also hands back the final world."""
    policy = build_policy(config)
    world = initial_world(config, resolve_targets(config, policy))
    costs = config.cost_params
    if config.strategy_override is not None:
        costs = CostParameters(costs.holding_rate, costs.backorder_penalty,
                               float(config.strategy_override.transport_cost_premium))
    trace: list[DayRecord] = []
    while world.day < world.horizon:
        trace.extend(step_day(world, policy, config.scenario, costs))
    return world, trace, KpiReport.from_world(world)


def run_simulation(config: RunConfig) -> tuple[list[DayRecord], KpiReport]:
    """Seed, run the full horizon, and return the trace with its KPIs."""
    _, trace, report = simulate(config)
    return trace, report
