from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from bullwhip.knowledge import STRATEGIES_KB, KnowledgeBase, KnowledgeDocument, DocumentKind, extract_parameters
from bullwhip.model import StrategyParameters
from bullwhip.panel import (
    PROMPT_TEMPLATE,
    CostRating,
    PanelRules,
    SpeedRating,
    evaluate_portfolio,
    rate_cost,
    rate_speed,
    render_prompt,
)


@pytest.mark.parametrize("premium,rating", [
    (0, CostRating.LOW), (75, CostRating.MEDIUM), (200, CostRating.VERY_HIGH)])
def test_cost_examples(premium, rating):
    assert rate_cost(StrategyParameters(0, premium)) is rating


@pytest.mark.parametrize("lead,rating", [
    (0, SpeedRating.VERY_FAST), (2, SpeedRating.MEDIUM), (4, SpeedRating.VERY_SLOW)])
def test_speed_examples(lead, rating):
    assert rate_speed(StrategyParameters(lead, 0)) is rating


def test_rating_matrix_for_shipped_strategies():
    kb = KnowledgeBase.load(STRATEGIES_KB)
    evals = evaluate_portfolio([(d, extract_parameters(d)) for d in kb.documents])
    got = {e.strategy_name: (e.cost.label, e.speed.label) for e in evals}
    assert got == {
        "REROUTE_PARTIAL": ("Medium", "Medium"),
        "EXPEDITE_SHIPPING": ("Very High", "Very Fast"),
        "ABSORB_COST": ("Low", "Very Slow"),
    }
    assert [e.strategy_name for e in evals] == [d.name for d in kb.documents]


def test_zero_strategy_and_empty_description():
    doc = KnowledgeDocument(DocumentKind.STRATEGY, "NOTHING", "")
    (ev,) = evaluate_portfolio([(doc, StrategyParameters(0, 0))])
    assert (ev.cost, ev.speed) == (CostRating.LOW, SpeedRating.VERY_FAST)
    assert ev.rendered_prompt == PROMPT_TEMPLATE.format(context="")
    assert ev.rendered_prompt.startswith("Context: \n")


def test_prompt_carries_context():
    assert "Context: ship it fast" in render_prompt("ship it fast")


def test_empty_portfolio_rejected():
    with pytest.raises(ValueError):
        evaluate_portfolio([])


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        rate_cost(StrategyParameters(0, -1))
    with pytest.raises(ValueError):
        rate_speed(StrategyParameters(-1, 0))


def test_custom_band_edges():
    rules = PanelRules(cost_edges=(10, 20, 30))
    assert rate_cost(StrategyParameters(0, 5), rules) is CostRating.LOW


def test_label_round_trip():
    for r in CostRating:
        assert CostRating.from_label(r.label) is r
    for r in SpeedRating:
        assert SpeedRating.from_label(r.label) is r


amounts = st.floats(0, 1e4, allow_nan=False)
leads = st.integers(0, 100)


@given(amounts, amounts)
def test_cost_monotone(a, b):
    lo, hi = sorted((a, b))
    assert rate_cost(StrategyParameters(0, hi)) >= rate_cost(StrategyParameters(0, lo))


@given(leads, leads)
def test_speed_monotone(a, b):
    lo, hi = sorted((a, b))
    assert rate_speed(StrategyParameters(hi, 0)) <= rate_speed(StrategyParameters(lo, 0))
