#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import json
import os

import pytest

# Import src

from netmigrate.errors import ContractError, TopologyError, UnknownNodeError
from netmigrate.netmodel import NodeKind, SiteKind, build_topology, node_equiv, render_topology, \
    shortest_paths_from, validate_topology


def test_fixture_builds(topology):
    assert len(topology.node_ids) == 16
    assert topology.enterprise_site.id == "ENT"
    assert topology.site("DC").kind is SiteKind.REMOTE_DC
    assert topology.neighbors("S3") == ("IPS1", "LB1", "S2", "v1")
    assert set(topology.nodes_of_kind(NodeKind.MIDDLEBOX)) == {"F1", "LB1", "IPS1", "F2", "LB2", "IPS2"}


def test_render_round_trip(topology):
    document: dict = render_topology(topology)
    rebuilt = build_topology(json.loads(json.dumps(document)))
    assert rebuilt == topology
    assert render_topology(rebuilt) == document


def test_address_resolution(topology):
    assert topology.resolve_address("L_1") == "203.0.113.10"
    assert topology.resolve_address("u1") == "10.1.1.11"
    assert topology.resolve_address("10.9.9.9") == "10.9.9.9"
    assert topology.resolve_address("nowhere") is None
    assert topology.host_for("10.1.1.11") == "u1"
    assert topology.node_for("203.0.113.10") == "LB1"
    assert topology.name_of("203.0.113.10") == "L_1"


def test_unknown_node(topology):
    with pytest.raises(UnknownNodeError):
        topology.node("S9")
    with pytest.raises(ContractError):
        topology.neighbors("S9")


def test_build_collects_every_error(document):
    document["links"].append(["S1", "S9"])
    document["nodes"].append({"id": "u1", "kind": "host", "site": "ENT", "addresses": ["10.1.1.99"]})
    document["nodes"].append({"id": "w1", "kind": "host", "site": "ENT", "addresses": []})
    document["sites"].append({"id": "ENT2", "kind": "enterprise"})
    with pytest.raises(TopologyError) as error:
        build_topology(document)
    issues: str = "\n".join(error.value.issues)
    assert "dangling link endpoint S9" in issues
    assert "duplicate node id u1" in issues
    assert "host w1 has no address" in issues
    assert "exactly one enterprise site required" in issues


def test_build_rejects_forwarding_to_non_neighbor(document):
    document["forwarding"]["S1"]["fib"]["10.1.1.11"] = "S3"
    with pytest.raises(TopologyError) as error:
        build_topology(document)
    assert any("non-adjacent node S3" in issue for issue in error.value.issues)


def test_build_rejects_unresolved_rewrite(document):
    lb1: dict = next(entry for entry in document["nodes"] if entry["id"] == "LB1")
    lb1["middlebox"]["rules"][0]["target"] = "10.77.0.1"
    with pytest.raises(TopologyError):
        build_topology(document)


def test_validate_clean_fixture(topology):
    assert validate_topology(topology) == []


def test_validate_warnings(document):
    document["nodes"].append({"id": "w1", "kind": "host", "site": "ENT", "addresses": ["10.1.1.11"]})
    document["nodes"].append({"id": "w2", "kind": "host", "site": "ENT", "addresses": ["10.5.5.5"]})
    document["links"].append(["w1", "w2"])
    issues: list = validate_topology(build_topology(document))
    messages: list = [issue.message for issue in issues]
    assert all(issue.severity == "warning" for issue in issues)
    assert any(message.startswith("address collision on 10.1.1.11 in site ENT") for message in messages)
    assert "unreachable component {w1, w2}" in messages


def test_node_equiv(topology, document):
    clone: dict = dict(next(entry for entry in document["nodes"] if entry["id"] == "F1"), id="F1c")
    document["nodes"].append(clone)
    document["links"].append(["F1c", "S1"])
    extended = build_topology(document)
    assert node_equiv(topology.node("F1"), extended.node("F1c"))
    assert not node_equiv(topology.node("F1"), topology.node("F2"))
    assert not node_equiv(topology.node("IPS1"), topology.node("IPS2"))
    with pytest.raises(ContractError):
        node_equiv(topology.node("S1"), topology.node("F1"))


def test_shortest_paths(topology):
    hops, previous = shortest_paths_from(topology, "u1")
    assert hops["u1"] == 0
    assert hops["S3"] == 2
    assert previous["S3"] == "IPS1"
    assert hops["u_e"] == 7


def test_schema_describes_the_fixture(document):
    path: str = os.path.join(os.path.dirname(__file__), os.pardir, "netmigrate", "schema", "topology.schema.json")
    with open(path, "r", encoding="utf-8") as handle:
        schema: dict = json.load(handle)
    assert set(schema["required"]) <= set(document)
    assert set(document) <= set(schema["properties"])
    node_kinds: list = schema["properties"]["nodes"]["items"]["properties"]["kind"]["enum"]
    assert {entry["kind"] for entry in document["nodes"]} <= set(node_kinds)
