from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from bullwhip.config import RunConfig
from bullwhip.knowledge import REACTIVE_KB, KnowledgeBase, POLICIES_KB
from bullwhip.model import ConfigError, DisruptionKind, Role
from bullwhip.policies import (
    PolicyKind,
    PolicySource,
    PolicyVariant,
    baseline_decide,
    collaborative_vmi_decide,
    hoarding_vmi_decide,
    selfish_decide,
    sga_set_policies,
    system_position,
)
from bullwhip.sim import simulate
from conftest import make_world

REACTIVE = KnowledgeBase.load(REACTIVE_KB)


@pytest.mark.parametrize("on_hand,expected", [(40, 60), (130, 0)])
def test_baseline_order_up_to(on_hand, expected):
    world = make_world(retailer={"on_hand": on_hand, "out_level": 100})
    assert baseline_decide(world).order_for(Role.RETAILER) == expected


def test_baseline_with_sga_levels_matches_kb():
    assert sga_set_policies(KnowledgeBase.load(POLICIES_KB)) == {
        Role.RETAILER: 100, Role.MANUFACTURER: 150, Role.SUPPLIER: 200}


def _stockout_world(day=0):
    # position 40 = 0 on hand + 65 in transit - 25 owed
    return make_world(day, manufacturer={"on_hand": 0, "backorders": 25, "on_order": 65,
                                         "out_level": 150})


def test_selfish_emergency_order():
    decision = selfish_decide(_stockout_world(day=5), REACTIVE, cooldown_until=0)
    assert decision.order_for(Role.MANUFACTURER) == 260
    assert decision.cooldown_until == 15


def test_selfish_cooldown_falls_back_to_baseline():
    decision = selfish_decide(_stockout_world(day=5), REACTIVE, cooldown_until=10)
    assert decision.order_for(Role.MANUFACTURER) == 110
    assert decision.cooldown_until is None


def test_selfish_without_kb_uses_baseline():
    assert selfish_decide(_stockout_world(), None, 0).order_for(Role.MANUFACTURER) == 110


entity_state = st.fixed_dictionaries({
    "on_hand": st.integers(0, 300),
    "backorders": st.integers(0, 100),
    "on_order": st.integers(0, 300),
    "out_level": st.integers(0, 300),
})


@given(entity_state, entity_state, entity_state, st.integers(0, 149))
def test_selfish_with_infinite_cooldown_is_baseline(s, m, r, day):
    world = make_world(day, supplier=s, manufacturer=m, retailer=r)
    assert selfish_decide(world, REACTIVE, cooldown_until=10**9) == baseline_decide(world)


def test_hoarding_consolidated_order_and_no_push():
    world = make_world(manufacturer={"on_hand": 50, "out_level": 150},
                       retailer={"on_hand": 30, "out_level": 100})
    decision = hoarding_vmi_decide(world)
    assert decision.order_for(Role.MANUFACTURER) == 170
    assert decision.push_shipments == []
    assert decision.order_for(Role.RETAILER) == 0


@pytest.mark.parametrize("m_on_hand,r_on_hand,push", [(80, 60, 40), (20, 60, 20), (80, 120, 0)])
def test_collaborative_push(m_on_hand, r_on_hand, push):
    world = make_world(manufacturer={"on_hand": m_on_hand, "out_level": 150},
                       retailer={"on_hand": r_on_hand, "out_level": 100})
    pushes = collaborative_vmi_decide(world).push_shipments
    assert sum(q for _, _, q in pushes) == push


@given(entity_state, entity_state, entity_state)
def test_vmi_invariants(s, m, r):
    world = make_world(supplier=s, manufacturer=m, retailer=r)
    decision = collaborative_vmi_decide(world)
    assert sum(q for _, _, q in decision.push_shipments) <= world.entity(Role.MANUFACTURER).on_hand
    assert decision.order_for(Role.RETAILER) == 0
    target = m["out_level"] + r["out_level"]
    before = system_position(world)
    assert before + decision.order_for(Role.MANUFACTURER) <= max(target, before)


def test_collaborative_retailer_never_orders():
    config = RunConfig(policy="collaborative-vmi").with_scenario(DisruptionKind.TRANSPORT_DISRUPTION)
    _, trace, _ = simulate(config)
    assert all(rec.ordered == 0 for rec in trace if rec.entity is Role.RETAILER)


def test_vmi_requires_sga_source():
    with pytest.raises(ConfigError):
        PolicyVariant(PolicyKind.COLLABORATIVE_VMI, PolicySource.FIXED)
    assert PolicyVariant.named("hoarding_vmi").source is PolicySource.SGA_AT_T0


def test_unknown_policy_name():
    with pytest.raises(ConfigError):
        PolicyKind.parse("greedy")
