#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import numpy
import pytest

# Import src

from netmigrate.errors import ContractError
from netmigrate.fixture import L_1, U_1, U_E, V_1
from netmigrate.netmodel import build_topology, shortest_paths_from
from netmigrate.policy import PacketHeader
from netmigrate.traversal import Deliver, Drop, Flood, Forward, Rewrite, deny_probes, forward_step, policy_probe, \
    probe_headers, simulate, tunnel_crossings


def _switches_document(links: list, hosts: dict, forwarding: dict = None) -> dict:
    nodes: list = []
    names: set = {name for link in links for name in link}
    for name in sorted(names):
        if name in hosts:
            nodes.append({"id": name, "kind": "host", "site": "ENT", "addresses": [hosts[name]]})
        else:
            nodes.append({"id": name, "kind": "switch", "site": "ENT", "addresses": []})
    return {"sites": [{"id": "ENT", "kind": "enterprise"}], "nodes": nodes, "links": links,
            "forwarding": forwarding or {}}


# Forwarding steps

def test_forward_step_by_kind(topology):
    header: PacketHeader = PacketHeader(U_E, L_1, 1024, 80, "TCP")
    assert forward_step(topology, "u_e", header) == Forward("CE")
    assert forward_step(topology, "CE", header, "u_e") == Forward("S1")
    assert forward_step(topology, "S1", header, "CE") == Forward("F1")
    assert forward_step(topology, "F1", header, "S1") == Forward("LB1")
    assert forward_step(topology, "LB1", header, "F1") == Rewrite(header.replace(dst=U_1), "S3")
    assert isinstance(forward_step(topology, "F1", header.replace(dport=22), "S1"), Drop)
    assert forward_step(topology, "u1", header.replace(dst=U_1), "IPS1") == Deliver()
    assert forward_step(topology, "v1", header.replace(dst=U_1), "S3") == Drop("not-addressed")


def test_switch_floods_on_miss(topology):
    action = forward_step(topology, "S3", PacketHeader(U_1, "10.9.9.9", 1024, 80, "TCP"), "IPS1")
    assert action == Flood(("LB1", "S2", "v1"))


# Simulation of the motivating example

def test_rewrite_splits_traversal(topology):
    traversal = simulate(topology, "u_e", PacketHeader(U_E, L_1, 1024, 80, "TCP"))
    assert traversal.outcome.delivered
    assert traversal.outcome.node == "u1"
    assert traversal.sigma == ("u_e", "CE", "S1", "F1", "LB1", "S3", "IPS1", "u1")
    assert len(traversal.rewrites) == 1
    assert traversal.rewrites[0].at == "LB1"
    assert traversal.rewrites[0].new.dst == U_1
    first, second = traversal.segments()
    assert first.sigma == ("u_e", "CE", "S1", "F1", "LB1")
    assert second.sigma == ("LB1", "S3", "IPS1", "u1")
    assert second.origin == "LB1" and second.last and not first.last
    assert first.reach == frozenset({"LB1", "F1", "CE", "S1", "u_e"})
    assert second.reach <= frozenset({"LB1", "IPS1", "S3", "u1"})
    assert traversal.reach_set == first.reach | second.reach


def test_reply_is_rewritten_back(topology):
    traversal = simulate(topology, "u1", PacketHeader(U_1, U_E, 80, 1024, "TCP"))
    assert traversal.outcome.node == "u_e"
    assert traversal.sigma == ("u1", "IPS1", "S3", "LB1", "F1", "S1", "CE", "u_e")
    assert traversal.rewrites[0].new.src == L_1


def test_reach_matches_scopes(topology, policy_set):
    for policy_id in ("P5", "P6"):
        policy = policy_set.get(policy_id)
        probe = policy_probe(policy, topology)
        traversal = simulate(topology, probe.inject_at, probe.header)
        assert traversal.outcome.delivered
        assert traversal.reach_set <= policy.scope
    traversal = simulate(topology, "u1", PacketHeader(U_1, V_1, 1024, 80, "TCP"))
    assert traversal.reach_set == frozenset({"u1", "IPS1", "S3", "v1"})


def test_router_acl_drop(document):
    document["forwarding"]["CE"]["acl"] = [{"match": {"dport": 22}, "action": "deny"}, {"action": "allow"}]
    topology = build_topology(document)
    traversal = simulate(topology, "u_e", PacketHeader(U_E, U_1, 1024, 22, "TCP"))
    assert traversal.outcome.kind == "dropped"
    assert traversal.outcome.node == "CE"
    assert traversal.outcome.reason == "acl"
    assert traversal.sigma == ("u_e", "CE")


def test_simulation_contracts(topology):
    header: PacketHeader = PacketHeader(U_E, L_1, 1024, 80, "TCP")
    with pytest.raises(ContractError):
        simulate(topology, "u_e", header, hop_limit=0)
    with pytest.raises(ContractError):
        simulate(topology, "nowhere", header)
    with pytest.raises(ContractError):
        simulate(topology, "u_e", PacketHeader("*", L_1, 1024, 80, "TCP"))


def test_short_hop_limit(topology):
    traversal = simulate(topology, "u_e", PacketHeader(U_E, L_1, 1024, 80, "TCP"), hop_limit=3)
    assert traversal.outcome.kind == "hop-limit"
    assert traversal.sigma == ("u_e", "CE", "S1", "F1")


def test_forwarding_loop_hits_hop_limit():
    links: list = [["h", "SA"], ["SA", "SB"], ["SB", "SC"], ["SC", "SA"]]
    forwarding: dict = {"SA": {"flood": False, "uplink": "SB"}, "SB": {"flood": False, "uplink": "SC"},
                        "SC": {"flood": False, "uplink": "SA"}}
    topology = build_topology(_switches_document(links, {"h": "10.0.0.1"}, forwarding))
    trace: list = []
    traversal = simulate(topology, "h", PacketHeader("10.0.0.1", "10.9.9.9", 1024, 80, "TCP"), trace=trace)
    assert traversal.outcome.kind == "hop-limit"
    assert str(traversal.outcome) == "HopLimitExceeded"
    assert traversal.sigma[:5] == ("h", "SA", "SB", "SC", "SA")
    assert trace[0].startswith("0 h forward")


def test_simulation_is_deterministic(topology):
    header: PacketHeader = PacketHeader(U_1, "10.9.9.9", 1024, 80, "TCP")
    assert simulate(topology, "u1", header) == simulate(topology, "u1", header)


def test_flooding_reaches_the_whole_component():
    random_state: numpy.random.RandomState = numpy.random.RandomState(11)
    for _ in range(25):
        size: int = random_state.randint(3, 8)
        switches: list = ["S" + str(index) for index in range(size)]
        links: list = [[switches[index], switches[index + 1]] for index in range(size - 1)]
        for first in range(size):
            for second in range(first + 2, size):
                if random_state.rand() < 0.35:
                    links.append([switches[first], switches[second]])
        hosts: dict = {}
        for index in range(4):
            name: str = "h" + str(index)
            hosts[name] = "10.0.0." + str(index + 1)
            links.append([name, switches[random_state.randint(0, size)]])
        topology = build_topology(_switches_document(links, hosts))
        component: set = set(shortest_paths_from(topology, "h0")[0])
        delivered = simulate(topology, "h0", PacketHeader("10.0.0.1", "10.0.0.2", 1024, 80, "TCP"))
        assert delivered.outcome.delivered and delivered.outcome.node == "h1"
        assert delivered.sigma[0] == "h0" and delivered.sigma[-1] == "h1"
        assert all(topology.linked(first, second) for first, second in zip(delivered.sigma, delivered.sigma[1:]))
        assert delivered.reach_set == component
        lost = simulate(topology, "h0", PacketHeader("10.0.0.1", "10.9.9.9", 1024, 80, "TCP"))
        assert not lost.outcome.delivered
        assert lost.reach_set == component


def _expand_states(topology, inject_at: str, header: PacketHeader) -> tuple:
    # closure over (node, ingress) states, one forward_step per state
    seen: set = set()
    pending: list = [(inject_at, None)]
    delivered: bool = False
    while pending:
        node, ingress = pending.pop()
        if (node, ingress) in seen:
            continue
        seen.add((node, ingress))
        action = forward_step(topology, node, header, ingress)
        if isinstance(action, Deliver):
            delivered = True
        elif isinstance(action, Flood):
            pending.extend((target, node) for target in action.targets)
        elif isinstance(action, Forward):
            pending.extend((target, node) for target in (action.next,) + tuple(action.copies))
    return {node for node, _ in seen}, delivered


def _random_switched_network(random_state: numpy.random.RandomState) -> tuple:
    size: int = random_state.randint(2, 7)
    switches: list = ["S" + str(index) for index in range(size)]
    links: list = [[switches[index], switches[random_state.randint(0, index)]] for index in range(1, size)]
    for first in range(size):
        for second in range(first + 1, size):
            if [switches[first], switches[second]] not in links and [switches[second], switches[first]] not in links \
                    and random_state.rand() < 0.3:
                links.append([switches[first], switches[second]])
    hosts: dict = {"h0": "10.0.0.1", "h1": "10.0.0.2"}
    for name in sorted(hosts):
        links.append([name, switches[random_state.randint(0, size)]])
    neighbors: dict = {switch: sorted({other for link in links if switch in link for other in link if other != switch})
                       for switch in switches}
    forwarding: dict = {}
    for switch in switches:
        entry: dict = {"flood": bool(random_state.rand() < 0.6)}
        for address in hosts.values():
            if random_state.rand() < 0.4:
                entry.setdefault("fib", {})[address] = neighbors[switch][random_state.randint(0, len(neighbors[switch]))]
        if random_state.rand() < 0.4:
            entry["uplink"] = neighbors[switch][random_state.randint(0, len(neighbors[switch]))]
        forwarding[switch] = entry
    return build_topology(_switches_document(links, hosts, forwarding)), list(hosts.values())


def test_reach_matches_state_closure_on_random_networks():
    random_state: numpy.random.RandomState = numpy.random.RandomState(29)
    for _ in range(200):
        topology, addresses = _random_switched_network(random_state)
        destination: str = (addresses + ["10.9.9.9"])[random_state.randint(0, 3)]
        header: PacketHeader = PacketHeader("10.0.0.1", destination, 1024, 80, "TCP")
        reach, delivered = _expand_states(topology, "h0", header)
        traversal = simulate(topology, "h0", header)
        assert traversal.reach_set == reach, (topology.links, topology.forwarding, destination)
        assert traversal.outcome.delivered == delivered


def test_flooding_ring_hits_hop_limit():
    links: list = [["S1", "S2"], ["S2", "S3"], ["S3", "S1"]]
    topology = build_topology(_switches_document(links, {}))
    traversal = simulate(topology, "S1", PacketHeader("10.0.0.1", "10.9.9.9", 1024, 80, "TCP"))
    assert str(traversal.outcome) == "HopLimitExceeded"
    assert traversal.reach_set == frozenset({"S1", "S2", "S3"})
    assert not traversal.outcome.delivered


# Probes

def test_policy_probes(topology, policy_set):
    probe = policy_probe(policy_set.get("P2"), topology)
    assert probe.inject_at == "LB1"
    assert probe.header == PacketHeader(U_E, U_1, 1024, 80, "TCP")
    probe = policy_probe(policy_set.get("P3"), topology)
    assert probe.inject_at == "u1"
    assert probe.header == PacketHeader(U_1, U_E, 80, 1024, "TCP")


def test_deny_probes(topology, policy_set):
    probes: list = deny_probes(policy_set, topology)
    assert len(probes) == 10
    assert all(probe.policy_id is None for probe in probes)
    assert ("u1", "10.1.2.11") not in {(probe.inject_at, probe.header.dst) for probe in probes}
    assert len(probe_headers(policy_set, topology)) == 16


def test_tunnel_crossings():
    document: dict = {
        "sites": [{"id": "ENT", "kind": "enterprise"}, {"id": "DC", "kind": "remote-dc"}],
        "nodes": [{"id": "TA", "kind": "tunnel-endpoint", "site": "ENT"},
                  {"id": "TB", "kind": "tunnel-endpoint", "site": "DC"}],
        "links": [["TA", "TB"]],
        "tunnels": [{"a": "TA", "b": "TB"}],
    }
    topology = build_topology(document)
    assert tunnel_crossings(topology, ("TA", "TB", "TA", "TB")) == 3
    assert tunnel_crossings(topology, ("TA",)) == 0
