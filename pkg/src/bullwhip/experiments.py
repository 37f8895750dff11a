"""Replicated experiments: the scenario grid, the hoarding demo, and the
strategic-choice what-if pipeline."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .config import RunConfig
from .knowledge import (
    KnowledgeBase,
    KnowledgeDocument,
    NoMatch,
    extract_parameters,
    retrieve_portfolio,
)
from .model import ConfigError, DayRecord, DisruptionKind, KpiReport, StrategyParameters
from .panel import CostRating, Evaluation, SpeedRating, evaluate_portfolio
from .policies import PolicyKind
from .sim import build_policy, resolve_targets, run_simulation

PORTFOLIO_QUERY = "transportation disruption response"
DEFAULT_SUITE_POLICIES = (PolicyKind.STATIC_BASELINE.value, PolicyKind.SELFISH_RAG.value)
DEFAULT_SUITE_SCENARIOS = (
    DisruptionKind.SUPPLIER_FAILURE.value,
    DisruptionKind.TRANSPORT_DISRUPTION.value,
    DisruptionKind.DEMAND_SURGE.value,
    DisruptionKind.QUALITY_FAILURE.value,
)


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ReplicationStats:
    mean_cost: float
    std_cost: float
    mean_service: float
    std_service: float
    n: int
    reports: tuple[KpiReport, ...] = field(default=(), compare=False, repr=False)

    @classmethod
    def from_samples(cls, costs: list[float], services: list[float],
                     reports: tuple[KpiReport, ...] = ()) -> ReplicationStats:
        mean_cost, std_cost = mean_std(costs)
        mean_service, std_service = mean_std(services)
        return cls(mean_cost, std_cost, mean_service, std_service, len(costs), reports)


def mean_std(values: list[float]) -> tuple[float, float]:
    """Sample mean and (n-1) standard deviation; std is 0 for a single value."""
    if not values:
        raise ValueError("need at least one value")
    mean = statistics.fmean(values)
    std = statistics.stdev(values, mean) if len(values) > 1 else 0.0
    return mean, std


def _validate(config: RunConfig) -> None:
    # surface bad names and unreadable knowledge bases before any stepping
    policy = build_policy(config)
    resolve_targets(config, policy)


def _run_one(config: RunConfig) -> KpiReport:
    return run_simulation(config)[1]


def run_replications(config: RunConfig, n: int, workers: int = 1) -> ReplicationStats:
    if n < 1:
        raise ConfigError("need at least one replication")
    _validate(config)
    configs = [config.replication(r) for r in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_one, configs))
    else:
        reports = [_run_one(c) for c in configs]
    return ReplicationStats.from_samples(
        [k.total_cost for k in reports], [k.service_level for k in reports], tuple(reports)
    )


@dataclass(frozen=True)
class SuiteCell:
    scenario: str
    policy: str
    stats: ReplicationStats


@dataclass(frozen=True)
class SuiteReport:
    cells: tuple[SuiteCell, ...]

    def cell(self, scenario: str, policy: str) -> ReplicationStats:
        for c in self.cells:
            if c.scenario == scenario and c.policy == policy:
                return c.stats
        raise KeyError((scenario, policy))

    @property
    def scenarios(self) -> list[str]:
        return list(dict.fromkeys(c.scenario for c in self.cells))

    @property
    def policies(self) -> list[str]:
        return list(dict.fromkeys(c.policy for c in self.cells))


def scenario_suite(policies: list[str], scenarios: list[str], n: int,
                   base: RunConfig | None = None, workers: int = 1) -> SuiteReport:
    """Replicate every (scenario, policy) pair; rows are scenarios."""
    if not policies or not scenarios:
        raise ConfigError("suite needs at least one policy and one scenario")
    base = base or RunConfig()
    grid = [
        (DisruptionKind.parse(s).value, PolicyKind.parse(p).value)
        for s in scenarios for p in policies
    ]
    configs = {(s, p): base.with_policy(p).with_scenario(s) for s, p in grid}
    for cfg in configs.values():
        _validate(cfg)
    return SuiteReport(tuple(
        SuiteCell(s, p, run_replications(configs[s, p], n, workers)) for s, p in grid
    ))


@dataclass(frozen=True)
class FrontierPoint:
    strategy_name: str
    total_cost: float
    service_level: float
    cost_rating: CostRating
    speed_rating: SpeedRating
    dominated: bool = False


def mark_dominated(points: list[FrontierPoint]) -> list[FrontierPoint]:
    """Flag points for which another point is no costlier and serves no worse."""
    out = []
    for i, p in enumerate(points):
        dominated = any(
            q.total_cost <= p.total_cost and q.service_level >= p.service_level
            for j, q in enumerate(points) if j != i
        )
        out.append(replace(p, dominated=dominated))
    return out


@dataclass(frozen=True)
class StrategicChoiceResult:
    portfolio: list[KnowledgeDocument]
    parameters: list[StrategyParameters]
    evaluations: list[Evaluation]
    frontier: list[FrontierPoint]
    traces: dict[str, list[DayRecord]]
    reports: dict[str, KpiReport]


def strategic_choice_experiment(config: RunConfig | None = None,
                                query: str = PORTFOLIO_QUERY) -> StrategicChoiceResult:
    """Retrieve strategies, rate them, and simulate each one on a common seed."""
    config = config or RunConfig().with_scenario(DisruptionKind.TRANSPORT_DISRUPTION)
    if PolicyKind.parse(config.policy) is not PolicyKind.COLLABORATIVE_VMI:
        raise ConfigError("strategic choice runs on the collaborative-vmi policy")
    if config.scenario.kind is not DisruptionKind.TRANSPORT_DISRUPTION:
        raise ConfigError("strategic choice runs against the transport disruption")

    kb = KnowledgeBase.load(config.kb_paths.strategies)
    try:
        portfolio = retrieve_portfolio(kb, query)
    except NoMatch as exc:
        raise ExperimentError(f"empty strategy portfolio: {exc}") from None
    params = [extract_parameters(doc) for doc in portfolio]
    evaluations = evaluate_portfolio(list(zip(portfolio, params)))

    points, traces, reports = [], {}, {}
    for doc, p, ev in zip(portfolio, params, evaluations):
        trace, report = run_simulation(replace(config, strategy_override=p))
        traces[doc.name] = trace
        reports[doc.name] = report
        points.append(FrontierPoint(doc.name, report.total_cost, report.service_level,
                                    ev.cost, ev.speed))
    return StrategicChoiceResult(portfolio, params, evaluations, mark_dominated(points),
                                 traces, reports)


def hoarding_demo(config: RunConfig | None = None) -> tuple[list[DayRecord], KpiReport]:
    config = config or RunConfig(policy=PolicyKind.HOARDING_VMI.value)
    if PolicyKind.parse(config.policy) is not PolicyKind.HOARDING_VMI:
        raise ConfigError("hoarding demo needs the hoarding-vmi policy")
    return run_simulation(config)
