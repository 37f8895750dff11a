"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 configuration error (bad config
file, unknown policy/scenario, malformed knowledge base), 4 runtime error
(simulation or export failure).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .charts import render_charts
from .config import RunConfig, load_run_config
from .experiments import (
    DEFAULT_SUITE_POLICIES,
    DEFAULT_SUITE_SCENARIOS,
    hoarding_demo,
    scenario_suite,
    strategic_choice_experiment,
)
from .knowledge import KnowledgeBaseError
from .model import ConfigError, DisruptionKind
from .policies import PolicyKind
from .reports import LabeledKpi, export_reports
from .sim import run_simulation

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4
SEED_ENV = "BULLWHIP_SEED"

log = logging.getLogger("bullwhip")


def _base_config(path: str | None) -> RunConfig:
    return load_run_config(path) if path else RunConfig()


def _apply_seed(config: RunConfig, flag: int | None) -> RunConfig:
    """Seed precedence: --seed, then $BULLWHIP_SEED, then the config file."""
    if flag is not None:
        return replace(config, base_seed=flag)
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return replace(config, base_seed=int(env))
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return config


def _report(paths: list[Path]) -> None:
    for p in paths:
        print(p)


def cmd_run(args: argparse.Namespace) -> int:
    config = _apply_seed(_base_config(args.config), args.seed)
    if args.policy:
        config = config.with_policy(args.policy)
    if args.scenario:
        config = config.with_scenario(args.scenario)
    trace, report = run_simulation(config)
    out = Path(args.out)
    written = export_reports(out, trace=trace,
                             kpis=[LabeledKpi(config.policy, config.base_seed, report)])
    window = config.scenario.window if config.scenario.kind is not DisruptionKind.NONE else None
    written.append(render_charts(trace, "timeseries", out / "timeseries.svg",
                                 title=f"On-hand inventory ({config.policy}, "
                                       f"{config.scenario.kind.value})",
                                 window=window))
    _report(written)
    print(f"total_cost={report.total_cost:.2f} service_level={report.service_level:.2f}")
    return EXIT_OK


def cmd_suite(args: argparse.Namespace) -> int:
    config = _apply_seed(_base_config(args.config), args.seed)
    policies = args.policies or list(DEFAULT_SUITE_POLICIES)
    scenarios = args.scenarios or list(DEFAULT_SUITE_SCENARIOS)
    suite = scenario_suite(policies, scenarios, args.reps, base=config)
    _report(export_reports(args.out, suite=suite))
    for c in suite.cells:
        print(f"{c.scenario:22s} {c.policy:18s} cost={c.stats.mean_cost:10.2f}"
              f" (sd {c.stats.std_cost:.2f})  service={c.stats.mean_service:6.2f}%"
              f" (sd {c.stats.std_service:.2f})")
    return EXIT_OK


def cmd_strategic_choice(args: argparse.Namespace) -> int:
    config = _base_config(args.config)
    if args.config is None:
        config = replace(config, policy=PolicyKind.COLLABORATIVE_VMI.value)
    if config.scenario.kind is DisruptionKind.NONE:
        config = config.with_scenario(DisruptionKind.TRANSPORT_DISRUPTION)
    config = _apply_seed(config, args.seed)
    result = strategic_choice_experiment(config)
    out = Path(args.out)
    written = export_reports(out, frontier=result.frontier, evaluations=result.evaluations,
                             kpis=[LabeledKpi(name, config.base_seed, rep)
                                   for name, rep in result.reports.items()])
    written.append(render_charts(result.frontier, "frontier", out / "frontier.svg"))
    for name, trace in result.traces.items():
        written.append(render_charts(trace, "timeseries", out / f"timeseries_{name.lower()}.svg",
                                     title=f"On-hand inventory ({name})",
                                     window=config.scenario.window))
    _report(written)
    for p in result.frontier:
        print(f"{p.strategy_name:22s} cost={p.total_cost:10.2f} service={p.service_level:6.2f}%"
              f"  [{p.cost_rating.label} cost, {p.speed_rating.label}]")
    return EXIT_OK


def cmd_hoarding_demo(args: argparse.Namespace) -> int:
    config = replace(_base_config(args.config), policy=PolicyKind.HOARDING_VMI.value)
    config = _apply_seed(config, args.seed)
    trace, report = hoarding_demo(config)
    out = Path(args.out)
    written = export_reports(out, trace=trace,
                             kpis=[LabeledKpi(config.policy, config.base_seed, report)])
    written.append(render_charts(trace, "timeseries", out / "hoarding.svg",
                                 title="On-hand inventory (hoarding-vmi)"))
    _report(written)
    print(f"total_cost={report.total_cost:.2f} service_level={report.service_level:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bullwhip",
                                     description="Three-echelon supply chain simulator.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one seeded simulation run")
    run.add_argument("--config", required=True, help="JSON run configuration")
    run.add_argument("--seed", type=int)
    run.add_argument("--policy", choices=[k.value for k in PolicyKind])
    run.add_argument("--scenario", choices=[k.value for k in DisruptionKind])
    run.add_argument("--out", default=".")
    run.set_defaults(func=cmd_run)

    suite = sub.add_parser("suite", help="replicated policy x scenario grid")
    suite.add_argument("--reps", type=int, default=30)
    suite.add_argument("--out", required=True)
    suite.add_argument("--config")
    suite.add_argument("--seed", type=int)
    suite.add_argument("--policies", nargs="+", choices=[k.value for k in PolicyKind])
    suite.add_argument("--scenarios", nargs="+", choices=[k.value for k in DisruptionKind])
    suite.set_defaults(func=cmd_suite)

    sc = sub.add_parser("strategic-choice", help="retrieve, rate and simulate response strategies")
    sc.add_argument("--config")
    sc.add_argument("--out", required=True)
    sc.add_argument("--seed", type=int)
    sc.set_defaults(func=cmd_strategic_choice)

    hd = sub.add_parser("hoarding-demo", help="the VMI variant that never pushes stock")
    hd.add_argument("--out", required=True)
    hd.add_argument("--config")
    hd.add_argument("--seed", type=int)
    hd.set_defaults(func=cmd_hoarding_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "reps", 1) < 1:
        print("error: --reps must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, KnowledgeBaseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - top-level boundary
        log.debug("runtime failure", exc_info=True)
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
