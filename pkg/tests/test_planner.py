#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import pytest

# Import src

from netmigrate import planner
from netmigrate.errors import ContractError, InfeasibleError
from netmigrate.extend import MIRROR, PROXY, CostModel, Mirror, apply_plan, map_policy_set, naive_plan, \
    plan_equivalents, verify_homomorphism, with_site_flexibility
from netmigrate.functions import check_all
from netmigrate.netmodel import Flexibility, build_topology
from netmigrate.planner import host_strategies, plan_extension


def _violations(topology, policy_set, plan) -> int:
    extended = apply_plan(topology, plan)
    return check_all(extended, map_policy_set(policy_set, plan), plan_equivalents(topology, extended, plan)).total


def test_host_strategies(topology):
    assert host_strategies(topology, "u1", "DC") == (PROXY, MIRROR)
    assert host_strategies(topology, "v1", "DC") == (PROXY, MIRROR)
    restricted = with_site_flexibility(topology, "DC", Flexibility.RESTRICTED)
    assert host_strategies(restricted, "u1", "DC") == (PROXY,)
    assert host_strategies(restricted, "v1", "DC") == (PROXY, MIRROR)


def test_nothing_to_relocate(topology, policy_set):
    plan = plan_extension(topology, policy_set, [], "DC")
    assert plan.actions == ()
    assert plan.cost.total == 0.0


def test_single_host_plan(topology, policy_set):
    plan = plan_extension(topology, policy_set, ["u1"], "DC")
    assert _violations(topology, policy_set, plan) == 0
    assert verify_homomorphism(topology, apply_plan(topology, plan), policy_set, plan).holds
    assert apply_plan(topology, plan).node("u1").site == "DC"
    assert plan.cost.total == 6.0
    assert len(plan.proxies) == 1 and plan.mirrors == ()


def test_two_hosts_prefer_mirroring(topology, policy_set):
    plan = plan_extension(topology, policy_set, ["u1", "v1"], "DC")
    assert _violations(topology, policy_set, plan) == 0
    assert (plan.cost.mirrored_boxes, plan.cost.wan_crossings, plan.cost.proxies) == (1, 4, 0)
    assert plan.cost.total == 5.0


def test_restricted_site_plans_without_mirrors(topology, policy_set):
    unrestricted = plan_extension(topology, policy_set, ["u1", "v1"], "DC")
    restricted_topology = with_site_flexibility(topology, "DC", Flexibility.RESTRICTED)
    restricted = plan_extension(restricted_topology, policy_set, ["u1", "v1"], "DC")
    assert not any(isinstance(action, Mirror) for action in restricted.actions)
    assert _violations(restricted_topology, policy_set, restricted) == 0
    assert restricted.cost.wan_crossings > unrestricted.cost.wan_crossings
    assert restricted.cost.total >= unrestricted.cost.total


def test_weights_change_the_choice(topology, policy_set):
    plan = plan_extension(topology, policy_set, ["u1", "v1"], "DC", CostModel(10.0, 1.0, 1.0))
    assert plan.mirrors == ()
    assert _violations(topology, policy_set, plan) == 0


def test_planner_beats_naive(topology, policy_set):
    naive = naive_plan(topology, ["u1", "v1"], "DC", policy_set)
    assert _violations(topology, policy_set, naive) > 0
    assert _violations(topology, policy_set, plan_extension(topology, policy_set, ["u1", "v1"], "DC")) == 0


def test_workers_do_not_change_the_result(topology, policy_set):
    sequential = plan_extension(topology, policy_set, ["u1", "v1"], "DC")
    threaded = plan_extension(topology, policy_set, ["u1", "v1"], "DC", workers=3)
    assert threaded.actions == sequential.actions
    assert threaded.cost == sequential.cost


def test_greedy_search(topology, policy_set, monkeypatch):
    exhaustive = plan_extension(topology, policy_set, ["u1", "v1"], "DC")
    monkeypatch.setattr(planner, "EXHAUSTIVE_BOUND", 1)
    greedy = plan_extension(topology, policy_set, ["u1", "v1"], "DC")
    assert _violations(topology, policy_set, greedy) == 0
    assert greedy.cost.total >= exhaustive.cost.total


def test_planner_contracts(topology, policy_set, document):
    with pytest.raises(ContractError):
        plan_extension(topology, policy_set, ["F1"], "DC")
    with pytest.raises(ContractError):
        plan_extension(topology, policy_set, ["u1"], "ENT")
    f1: dict = next(entry for entry in document["nodes"] if entry["id"] == "F1")
    f1["middlebox"]["rules"][-1]["action"] = "allow"
    with pytest.raises(ContractError):
        plan_extension(build_topology(document), policy_set, ["u1"], "DC")


def test_infeasible_names_blocking_policies(topology, policy_set, monkeypatch):
    naive = naive_plan(topology, ["u1"], "DC", policy_set)
    failing = verify_homomorphism(topology, apply_plan(topology, naive), policy_set, naive)
    monkeypatch.setattr(planner, "verify_homomorphism", lambda *arguments, **keywords: failing)
    with pytest.raises(InfeasibleError) as error:
        plan_extension(topology, policy_set, ["u1"], "DC")
    assert "P2" in error.value.policy_ids
    assert "P2" in str(error.value)
