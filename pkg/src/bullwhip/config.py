"""Run configuration and its JSON loader."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .knowledge import POLICIES_KB, REACTIVE_KB, STRATEGIES_KB
from .model import (
    ROLES,
    ChainParameters,
    ConfigError,
    CostParameters,
    DemandModel,
    DisruptionKind,
    DisruptionScenario,
    Role,
    StrategyParameters,
)
from .policies import PolicyKind


@dataclass(frozen=True)
class KbPaths:
    policies: Path = POLICIES_KB
    strategies: Path = STRATEGIES_KB
    reactive: Path = REACTIVE_KB


@dataclass(frozen=True)
class RunConfig:
    horizon: int = 150
    base_seed: int = 0
    policy: str = PolicyKind.COLLABORATIVE_VMI.value
    scenario: DisruptionScenario = field(default_factory=DisruptionScenario)
    cost_params: CostParameters = field(default_factory=CostParameters)
    demand: DemandModel = field(default_factory=DemandModel)
    chain: ChainParameters = field(default_factory=ChainParameters)
    kb_paths: KbPaths = field(default_factory=KbPaths)
    strategy_override: StrategyParameters | None = None
    # end of the strategy premium window; None means the disruption's end
    strategy_window_end: int | None = None

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigError("horizon must be at least 1")
        PolicyKind.parse(self.policy)

    def replication(self, r: int) -> RunConfig:
        return replace(self, base_seed=self.base_seed + r)

    def with_policy(self, policy: str | PolicyKind) -> RunConfig:
        return replace(self, policy=PolicyKind.parse(policy).value)

    def with_scenario(self, kind: str | DisruptionKind, **kwargs: Any) -> RunConfig:
        start = kwargs.pop("start_day", self.scenario.start_day)
        return replace(self, scenario=DisruptionScenario.of(kind, start, **kwargs))


_TOP_KEYS = {"horizon", "seed", "base_seed", "policy", "scenario", "costs", "demand",
             "chain", "kb", "strategy", "strategy_window_end"}


def _expect(obj: Any, kind: type | tuple[type, ...], where: str) -> Any:
    if isinstance(obj, bool) and kind in (int, float, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {obj!r}")
    if not isinstance(obj, kind):
        raise ConfigError(f"{where}: expected {getattr(kind, '__name__', kind)}, got {obj!r}")
    return obj


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")


def _role_map(obj: Any, where: str, cast: type) -> dict[Role, Any]:
    _expect(obj, dict, where)
    out = {}
    for key, value in obj.items():
        out[Role.parse(key)] = cast(_expect(value, (int, float), f"{where}.{key}"))
    return out


def _scenario(obj: Any) -> DisruptionScenario:
    if isinstance(obj, str):
        return DisruptionScenario.of(obj)
    _expect(obj, dict, "scenario")
    _check_keys(obj, {"kind", "start_day", "duration_days", "magnitude"}, "scenario")
    return DisruptionScenario.of(
        obj.get("kind", "none"),
        start_day=_expect(obj.get("start_day", 60), int, "scenario.start_day"),
        duration_days=obj.get("duration_days"),
        magnitude=obj.get("magnitude"),
    )


def _costs(obj: Any) -> CostParameters:
    _expect(obj, dict, "costs")
    _check_keys(obj, {"holding_rate", "backorder_penalty", "premium_per_shipment"}, "costs")
    default = CostParameters()
    holding = obj.get("holding_rate", default.holding_rate)
    if isinstance(holding, (int, float)) and not isinstance(holding, bool):
        holding = {role: float(holding) for role in ROLES}
    elif isinstance(holding, dict) and not all(isinstance(k, Role) for k in holding):
        holding = {**default.holding_rate, **_role_map(holding, "costs.holding_rate", float)}
    return CostParameters(
        holding_rate=holding,
        backorder_penalty=float(_expect(obj.get("backorder_penalty", default.backorder_penalty),
                                        (int, float), "costs.backorder_penalty")),
        premium_per_shipment=float(_expect(obj.get("premium_per_shipment", 0.0),
                                           (int, float), "costs.premium_per_shipment")),
    )


def _demand(obj: Any) -> DemandModel:
    _expect(obj, dict, "demand")
    _check_keys(obj, {"base_rate", "surge_multiplier", "deterministic"}, "demand")
    return DemandModel(
        base_rate=float(_expect(obj.get("base_rate", 10.0), (int, float), "demand.base_rate")),
        surge_multiplier=float(_expect(obj.get("surge_multiplier", 1.5), (int, float),
                                       "demand.surge_multiplier")),
        deterministic=bool(obj.get("deterministic", False)),
    )


def _chain(obj: Any) -> ChainParameters:
    _expect(obj, dict, "chain")
    ints = {"supplier_to_manufacturer_lead", "manufacturer_to_retailer_lead",
            "production_lead", "production_capacity"}
    _check_keys(obj, ints | {"baseline_out_levels", "initial_on_hand"}, "chain")
    default = ChainParameters()
    kwargs: dict[str, Any] = {k: _expect(obj[k], int, f"chain.{k}") for k in ints if k in obj}
    if "baseline_out_levels" in obj:
        kwargs["baseline_out_levels"] = {
            **default.baseline_out_levels,
            **_role_map(obj["baseline_out_levels"], "chain.baseline_out_levels", int),
        }
    if "initial_on_hand" in obj:
        kwargs["initial_on_hand"] = _role_map(obj["initial_on_hand"], "chain.initial_on_hand", int)
    return ChainParameters(**kwargs)


def config_from_dict(doc: dict[str, Any], base_dir: Path | None = None) -> RunConfig:
    """Build a RunConfig from a parsed JSON document; absent fields take defaults."""
    _expect(doc, dict, "config")
    _check_keys(doc, _TOP_KEYS, "config")
    kwargs: dict[str, Any] = {}
    if "horizon" in doc:
        kwargs["horizon"] = _expect(doc["horizon"], int, "horizon")
    seed = doc.get("base_seed", doc.get("seed"))
    if seed is not None:
        kwargs["base_seed"] = _expect(seed, int, "seed")
    if "policy" in doc:
        kwargs["policy"] = PolicyKind.parse(_expect(doc["policy"], str, "policy")).value
    if "scenario" in doc:
        kwargs["scenario"] = _scenario(doc["scenario"])
    if "costs" in doc:
        kwargs["cost_params"] = _costs(doc["costs"])
    if "demand" in doc:
        kwargs["demand"] = _demand(doc["demand"])
    if "chain" in doc:
        kwargs["chain"] = _chain(doc["chain"])
    if "kb" in doc:
        kb = _expect(doc["kb"], dict, "kb")
        _check_keys(kb, {"policies", "strategies", "reactive"}, "kb")
        base = base_dir or Path.cwd()
        defaults = KbPaths()
        kwargs["kb_paths"] = KbPaths(**{
            name: (base / _expect(kb[name], str, f"kb.{name}")) if name in kb else getattr(defaults, name)
            for name in ("policies", "strategies", "reactive")
        })
    if "strategy" in doc:
        strat = _expect(doc["strategy"], dict, "strategy")
        _check_keys(strat, {"extra_lead_time", "transport_cost_premium"}, "strategy")
        kwargs["strategy_override"] = StrategyParameters(
            extra_lead_time=_expect(strat.get("extra_lead_time", 0), int, "strategy.extra_lead_time"),
            transport_cost_premium=_expect(strat.get("transport_cost_premium", 0), (int, float),
                                           "strategy.transport_cost_premium"),
        )
    if doc.get("strategy_window_end") is not None:
        kwargs["strategy_window_end"] = _expect(doc["strategy_window_end"], int, "strategy_window_end")
    return RunConfig(**kwargs)


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return config_from_dict(doc, base_dir=path.parent)
