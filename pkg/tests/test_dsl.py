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

from netmigrate.dsl import DEFAULT_BANNER, parse_policy_set, render_policy_set
from netmigrate.errors import PolicyParseError
from netmigrate.fixture import L_1, U_1, U_E
from netmigrate.policy import PacketHeader, Relation


def _issues(text: str, topology=None) -> list:
    with pytest.raises(PolicyParseError) as error:
        parse_policy_set(text, topology)
    return error.value.issues


def test_fixture_policies(policy_set):
    assert [policy.id for policy in policy_set] == ["P1", "P2", "P3", "P4", "P5", "P6"]
    p1 = policy_set.get("P1")
    assert (p1.packet_class.src, p1.packet_class.dst, p1.packet_class.dport, p1.packet_class.proto) == \
        (U_E, L_1, 80, "TCP")
    assert p1.packet_class.sport is None
    assert p1.destination == "LB1"
    assert p1.waypoint_spec.precedence == frozenset({("F1", "LB1")})
    p2 = policy_set.get("P2")
    assert p2.packet_class.origin_constraint == "LB1"
    assert p2.destination == "u1"
    ips = p2.waypoint_spec.occurrence[0]
    assert (ips.node, ips.relation, ips.count) == ("IPS1", Relation.GE, 1)
    assert policy_set.get("P3").destination == "LB1"
    assert policy_set.get("P3").packet_class.src == U_1
    assert policy_set.get("P4").waypoint_spec.empty


def test_render_round_trip(topology, policy_set):
    text: str = render_policy_set(policy_set, topology)
    assert text.startswith(DEFAULT_BANNER)
    assert parse_policy_set(text, topology) == policy_set
    assert render_policy_set(parse_policy_set(text, topology), topology) == text


def test_render_uses_symbolic_names(topology, policy_set):
    text: str = render_policy_set(policy_set, topology)
    assert "policy P1: [u_e, L_1, *, 80, TCP]" in text
    assert "policy P3: [u1, u_e, 80, *, TCP] to LB1" in text
    assert "waypoints [F2 -> LB2 -> IPS2]" in text


def test_without_topology_tokens_stay_literal():
    policy_set = parse_policy_set("policy W: [10.0.0.1, 10.0.0.0/24, *, 443, tcp] scope {A, B} waypoints [A] occur {A == 1}")
    policy = policy_set.get("W")
    assert policy.packet_class.dst == "10.0.0.0/24"
    assert policy.packet_class.proto == "TCP"
    assert policy.destination == "10.0.0.0/24"


def test_ipv6_literals():
    text: str = "policy V6: [2001:db8::10, 2001:db8:1::/48, *, 443, TCP] scope {A, B} waypoints [A] occur {A == 1}"
    policy_set = parse_policy_set(text)
    policy = policy_set.get("V6")
    assert policy.packet_class.src == "2001:db8::10"
    assert policy.packet_class.dst == "2001:db8:1::/48"
    assert policy.packet_class.matches(PacketHeader("2001:db8::10", "2001:db8:1::7", 1024, 443, "TCP"))
    assert parse_policy_set(render_policy_set(policy_set)) == policy_set
    assert "policy V6: [2001:db8::10, 2001:db8:1::/48, *, 443, TCP]" in render_policy_set(policy_set)


def test_unknown_node_position(topology):
    line: str = "policy X: [u_e, u1, *, 80, TCP] scope {u1, Q9} waypoints [] occur {}"
    issues: list = _issues("# comment\n" + line, topology)
    assert len(issues) == 1
    assert (issues[0].line, issues[0].column) == (2, line.index("Q9") + 1)
    assert "unknown node 'Q9'" in issues[0].message


def test_every_malformed_policy_reported():
    text: str = ("policy A: [*, *, *, 80] scope {N} waypoints [] occur {}\n"
                 "policy B: [*, *, *, 80, TCP] scope {N} waypoints [N] occur {N >= 0}\n"
                 "policy C: [*, *, *, 80, TCP] scope {N} waypoints [N] occur {N == 1}\n")
    issues: list = _issues(text)
    assert [issue.line for issue in issues] == [1, 2]
    assert "expected ','" in issues[0].message
    assert "vacuous occurrence constraint" in issues[1].message


def test_semantic_errors():
    issues: list = _issues("policy A: [*, *, *, 80, TCP] scope {N, M} waypoints [N -> M, M -> N] occur {}\n"
                           "policy A: [*, *, *, 99999, TCP] scope {N} waypoints [K] occur {Z == 1}\n")
    messages: str = "\n".join(issue.message for issue in issues)
    assert "cyclic precedence" in messages
    assert "duplicate policy id A" in messages
    assert "invalid port '99999'" in messages
    assert "waypoint K is outside the scope of A" in messages
    assert "occurrence on non-waypoint node Z" in messages


def test_unexpected_character():
    issues: list = _issues("policy A: [*, *, *, 80, TCP] scope {N} $ waypoints [] occur {}")
    assert issues[0].column == 40
    assert "unexpected character '$'" in issues[0].message


def test_destination_outside_scope(topology):
    issues: list = _issues("policy X: [u_e, u1, *, 80, TCP] scope {IPS1} waypoints [IPS1] occur {}", topology)
    assert "destination u1 of X is outside its scope" in issues[0].message


def test_empty_document():
    assert len(parse_policy_set("# nothing here\n")) == 0
