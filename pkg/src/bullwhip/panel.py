"""Rule-based expert panel rating strategies on cost and speed."""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass

from .knowledge import KnowledgeDocument
from .model import StrategyParameters

PROMPT_TEMPLATE = (
    "Context: {context}\n"
    "\n"
    "Based on the context provided, evaluate the strategy on two\n"
    "criteria: Cost and Speed. Provide your ratings in a simple\n"
    "'key: value' format."
)


class CostRating(enum.IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2
    VERY_HIGH = 3

    @property
    def label(self) -> str:
        return self.name.replace("_", " ").title()

    @classmethod
    def from_label(cls, label: str) -> CostRating:
        return cls[label.strip().upper().replace(" ", "_")]


class SpeedRating(enum.IntEnum):
    VERY_SLOW = 0
    SLOW = 1
    MEDIUM = 2
    FAST = 3
    VERY_FAST = 4

    @property
    def label(self) -> str:
        return self.name.replace("_", " ").title()

    @classmethod
    def from_label(cls, label: str) -> SpeedRating:
        return cls[label.strip().upper().replace(" ", "_")]


@dataclass(frozen=True)
class PanelRules:
    """Band edges; a value at or above edge i falls in band i + 1.

    ``cost_edges`` splits the per-shipment premium into Low / Medium /
    High / Very High; ``speed_edges`` splits the added lead time into
    Very Fast / Fast / Medium / Slow / Very Slow.
    """

    cost_edges: tuple[float, float, float] = (1, 100, 200)
    speed_edges: tuple[int, int, int, int] = (1, 2, 3, 4)


DEFAULT_RULES = PanelRules()


@dataclass(frozen=True)
class Evaluation:
    strategy_name: str
    cost: CostRating
    speed: SpeedRating
    rendered_prompt: str


def rate_cost(params: StrategyParameters, rules: PanelRules = DEFAULT_RULES) -> CostRating:
    if params.transport_cost_premium < 0:
        raise ValueError("premium must be non-negative")
    return CostRating(bisect.bisect_right(rules.cost_edges, params.transport_cost_premium))


def rate_speed(params: StrategyParameters, rules: PanelRules = DEFAULT_RULES) -> SpeedRating:
    if params.extra_lead_time < 0:
        raise ValueError("extra lead time must be non-negative")
    band = bisect.bisect_right(rules.speed_edges, params.extra_lead_time)
    return SpeedRating(SpeedRating.VERY_FAST - band)


def render_prompt(description: str) -> str:
    return PROMPT_TEMPLATE.format(context=description)


def evaluate_portfolio(strategies: list[tuple[KnowledgeDocument, StrategyParameters]],
                       rules: PanelRules = DEFAULT_RULES) -> list[Evaluation]:
    if not strategies:
        raise ValueError("nothing to evaluate")
    return [
        Evaluation(doc.name, rate_cost(params, rules), rate_speed(params, rules),
                   render_prompt(doc.description))
        for doc, params in strategies
    ]
