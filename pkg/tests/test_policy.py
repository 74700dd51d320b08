#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import itertools

import numpy
import pytest

# Import src

from netmigrate.errors import AmbiguousMatchError, ContractError
from netmigrate.policy import DEFAULT_DENY, OccurrenceConstraint, PacketClass, PacketHeader, Policy, PolicySet, \
    Relation, WaypointSpec, address_in, check_scope, check_waypoints, find_precedence_cycle, match_packet, occur

NODES: tuple = ("A", "B", "C", "D", "E")


def _policy(policy_id: str, packet_class: PacketClass, scope=("A",)) -> Policy:
    return Policy(policy_id, packet_class, None, WaypointSpec(), frozenset(scope))


def _header(src: str = "10.0.0.1", dst: str = "10.0.0.2", sport: int = 1024, dport: int = 80,
            proto: str = "TCP") -> PacketHeader:
    return PacketHeader(src, dst, sport, dport, proto)


# Matching

def test_address_in():
    assert address_in("10.1.1.11", "10.1.1.11")
    assert address_in("10.1.1.11", "10.0.0.0/8")
    assert not address_in("11.1.1.11", "10.0.0.0/8")
    assert not address_in("10.1.1.11", "L_1")


def test_most_specific_class_wins():
    policy_set: PolicySet = PolicySet([
        _policy("broad", PacketClass(dst="10.0.0.0/8")),
        _policy("narrow", PacketClass(dst="10.0.0.2", dport=80, proto="TCP")),
    ])
    assert match_packet(policy_set, _header(), "A").id == "narrow"
    assert match_packet(policy_set, _header(dport=443), "A").id == "broad"


def test_unmatched_packet_is_default_denied():
    policy_set: PolicySet = PolicySet([_policy("web", PacketClass(dport=80))])
    assert match_packet(policy_set, _header(dport=22), "A") is DEFAULT_DENY
    assert match_packet(PolicySet(), _header(), "A") is DEFAULT_DENY


def test_equal_specificity_is_ambiguous():
    policy_set: PolicySet = PolicySet([
        _policy("by_source", PacketClass(src="10.0.0.1")),
        _policy("by_port", PacketClass(dport=80)),
    ])
    with pytest.raises(AmbiguousMatchError) as error:
        match_packet(policy_set, _header(), "A")
    assert set(error.value.policy_ids) == {"by_source", "by_port"}


def test_origin_constraint_breaks_ties_and_filters():
    policy_set: PolicySet = PolicySet([
        _policy("anywhere", PacketClass(dst="10.0.0.2")),
        _policy("reborn", PacketClass(dst="10.0.0.2", origin_constraint="LB")),
    ])
    assert match_packet(policy_set, _header(), "LB").id == "reborn"
    assert match_packet(policy_set, _header(), "A").id == "anywhere"


def test_non_concrete_header_rejected():
    with pytest.raises(ContractError):
        match_packet(PolicySet(), PacketHeader("*", "10.0.0.2", None, 80, "TCP"), "A")


# Policy invariants

def test_policy_invariants():
    with pytest.raises(ContractError):
        Policy("P", PacketClass(), None, WaypointSpec(), frozenset())
    with pytest.raises(ContractError):
        Policy("P", PacketClass(), None, WaypointSpec(("B",)), frozenset({"A"}))
    with pytest.raises(ContractError):
        WaypointSpec(("A", "B"), frozenset({("A", "B"), ("B", "A")}))
    with pytest.raises(ContractError):
        WaypointSpec(("A",), frozenset({("A", "C")}))
    with pytest.raises(ContractError):
        OccurrenceConstraint("A", Relation.GE, 0)
    with pytest.raises(ContractError):
        OccurrenceConstraint("A", Relation.EQ, -1)
    with pytest.raises(ContractError):
        PolicySet([_policy("P", PacketClass()), _policy("P", PacketClass(dport=80))])


def test_find_precedence_cycle():
    assert find_precedence_cycle({("A", "B"), ("B", "C")}) is None
    assert find_precedence_cycle({("A", "B"), ("B", "C"), ("C", "A")}) == ["A", "B", "C", "A"]


# Waypoints

def test_waypoints_on_examples():
    spec: WaypointSpec = WaypointSpec(("F", "LB"), frozenset({("F", "LB")}),
                                      (OccurrenceConstraint("F", Relation.EQ, 1),))
    assert check_waypoints(spec, ("S", "F", "LB", "H")).satisfied
    kinds: set = {failure.kind for failure in check_waypoints(spec, ("S", "LB", "F", "H")).failures}
    assert kinds == {"order"}
    kinds = {failure.kind for failure in check_waypoints(spec, ("S", "LB", "H")).failures}
    assert kinds == {"occurrence", "order"}
    kinds = {failure.kind for failure in check_waypoints(spec, ("S", "F", "H")).failures}
    assert kinds == {"missed", "order"}


def test_waypoints_with_equivalents():
    spec: WaypointSpec = WaypointSpec(("IPS",), frozenset(), (OccurrenceConstraint("IPS", Relation.EQ, 1),))
    assert not check_waypoints(spec, ("S", "IPS'", "H")).satisfied
    assert check_waypoints(spec, ("S", "IPS'", "H"), {"IPS": ("IPS'",)}).satisfied
    assert occur(("IPS", "IPS'"), "IPS", {"IPS": ("IPS'",)}) == 2


def _oracle(spec: WaypointSpec, sigma: tuple) -> bool:
    counts: dict = {node: sigma.count(node) for node in NODES}
    for waypoint in spec.waypoints:
        if not spec.constraints_on(waypoint) and counts[waypoint] == 0:
            return False
    for constraint in spec.occurrence:
        expected: bool = {Relation.EQ: counts[constraint.node] == constraint.count,
                          Relation.GE: counts[constraint.node] >= constraint.count,
                          Relation.LE: counts[constraint.node] <= constraint.count}[constraint.relation]
        if not expected:
            return False
    for first, second in spec.precedence:
        if counts[first] and counts[second]:
            if sigma.index(first) > sigma.index(second):
                return False
            continue
        for node in (first, second):
            if counts[node] == 0:
                constraints: list = spec.constraints_on(node)
                if not constraints or any(constraint.count > 0 and constraint.relation is not Relation.LE
                                          for constraint in constraints):
                    return False
    return True


def _random_spec(random_state: numpy.random.RandomState) -> WaypointSpec:
    size: int = random_state.randint(0, len(NODES) + 1)
    waypoints: list = list(random_state.choice(NODES, size=size, replace=False))
    precedence: set = set()
    for first, second in itertools.combinations(waypoints, 2):
        if random_state.rand() < 0.3:
            precedence.add((str(first), str(second)))
    occurrence: list = []
    for waypoint in waypoints:
        if random_state.rand() < 0.5:
            relation: Relation = [Relation.EQ, Relation.GE, Relation.LE][random_state.randint(0, 3)]
            count: int = random_state.randint(1 if relation is Relation.GE else 0, 3)
            occurrence.append(OccurrenceConstraint(str(waypoint), relation, count))
    return WaypointSpec(tuple(str(waypoint) for waypoint in waypoints), frozenset(precedence), tuple(occurrence))


def test_waypoints_against_exhaustive_oracle():
    random_state: numpy.random.RandomState = numpy.random.RandomState(2026)
    specs: list = [_random_spec(random_state) for _ in range(50)]
    for length in range(0, 7):
        for sigma in itertools.product(NODES, repeat=length):
            for spec in specs:
                assert check_waypoints(spec, sigma).satisfied == _oracle(spec, sigma), (spec, sigma)


# Scope

def test_check_scope():
    assert check_scope({"A", "B"}, {"A"}).contained
    verdict = check_scope({"A", "B"}, {"A", "C", "D"})
    assert verdict.leaks == frozenset({"C", "D"})
    assert not verdict.contained
