#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import copy

# Import required src

from netmigrate.dsl import parse_policy_set
from netmigrate.netmodel import Topology, build_topology

# Define the addresses of the motivating example

U_E: str = "198.51.100.10"
L_1: str = "203.0.113.10"
U_1: str = "10.1.1.11"
V_1: str = "10.1.2.11"
U_2: str = "10.2.1.21"

# Define the motivating example network: an Internet client u_e behind the edge router CE, a tier-1 area (firewall
# F1, load balancer LB1 holding the public address L_1, inline IPS1 in front of u1, server v1 in a second subnet)
# and a tier-2 area (F2, LB2, IPS2 in front of u2). INET is the attachment point of the rest of the Internet.

_FIXTURE_DOCUMENT: dict = {
    "sites": [
        {"id": "ENT", "kind": "enterprise", "flexibility": "full"},
        {"id": "DC", "kind": "remote-dc", "flexibility": "full"},
    ],
    "nodes": [
        {"id": "u_e", "kind": "host", "site": "ENT", "addresses": [U_E]},
        {"id": "INET", "kind": "router", "site": "ENT", "addresses": []},
        {"id": "CE", "kind": "router", "site": "ENT", "addresses": []},
        {"id": "S1", "kind": "switch", "site": "ENT", "addresses": []},
        {"id": "S2", "kind": "switch", "site": "ENT", "addresses": []},
        {"id": "S3", "kind": "switch", "site": "ENT", "addresses": []},
        {"id": "S4", "kind": "switch", "site": "ENT", "addresses": []},
        {"id": "F1", "kind": "middlebox", "site": "ENT", "addresses": [],
         "middlebox": {"class": "Firewall", "rules": [
             {"match": {"dst": L_1, "dport": 80, "proto": "TCP"}, "action": "allow"},
             {"match": {"src": L_1, "sport": 80, "proto": "TCP"}, "action": "allow"},
             {"match": {}, "action": "deny"}]}},
        {"id": "LB1", "kind": "middlebox", "site": "ENT", "addresses": [L_1],
         "middlebox": {"class": "LoadBalancer", "rules": [
             {"match": {"dst": L_1, "dport": 80, "proto": "TCP"}, "action": "rewrite-dst", "target": U_1},
             {"match": {"src": U_1, "sport": 80, "proto": "TCP"}, "action": "rewrite-src", "target": L_1},
             {"match": {}, "action": "allow"}]}},
        {"id": "IPS1", "kind": "middlebox", "site": "ENT", "addresses": [],
         "middlebox": {"class": "IPS", "rules": [
             {"match": {"src": U_1}, "action": "allow"},
             {"match": {"src": U_E, "dst": U_1, "dport": 80, "proto": "TCP"}, "action": "allow"},
             {"match": {}, "action": "deny"}]}},
        {"id": "F2", "kind": "middlebox", "site": "ENT", "addresses": [],
         "middlebox": {"class": "Firewall", "rules": [
             {"match": {"src": V_1}, "action": "deny"},
             {"match": {"proto": "TCP"}, "action": "allow"},
             {"match": {}, "action": "deny"}]}},
        {"id": "LB2", "kind": "middlebox", "site": "ENT", "addresses": [],
         "middlebox": {"class": "LoadBalancer", "rules": [
             {"match": {}, "action": "allow"}]}},
        {"id": "IPS2", "kind": "middlebox", "site": "ENT", "addresses": [],
         "middlebox": {"class": "IPS", "rules": [
             {"match": {"dst": U_2}, "action": "allow"},
             {"match": {}, "action": "deny"}]}},
        {"id": "u1", "kind": "host", "site": "ENT", "addresses": [U_1]},
        {"id": "v1", "kind": "host", "site": "ENT", "addresses": [V_1]},
        {"id": "u2", "kind": "host", "site": "ENT", "addresses": [U_2]},
    ],
    "links": [
        ["u_e", "CE"], ["CE", "INET"], ["CE", "S1"], ["S1", "F1"], ["F1", "LB1"], ["LB1", "S3"],
        ["S3", "IPS1"], ["IPS1", "u1"], ["S3", "v1"], ["S3", "S2"], ["S2", "F2"], ["F2", "LB2"],
        ["LB2", "S4"], ["S4", "IPS2"], ["IPS2", "u2"],
    ],
    "forwarding": {
        "CE": {"routes": [[U_E + "/32", "u_e"], ["10.0.0.0/8", "S1"], ["203.0.113.0/24", "S1"], ["0.0.0.0/0", "INET"]]},
        "S1": {"fib": {U_E: "CE", L_1: "F1", U_1: "F1", V_1: "F1", U_2: "F1"}},
        "LB1": {"routes": [["10.0.0.0/8", "S3"], ["0.0.0.0/0", "F1"]]},
        "S3": {"fib": {U_1: "IPS1", V_1: "v1", U_2: "S2", U_E: "LB1", L_1: "LB1"}},
        "S2": {"fib": {U_2: "F2", U_1: "S3", V_1: "S3", U_E: "S3", L_1: "S3"}},
        "S4": {"fib": {U_2: "IPS2", U_1: "LB2", V_1: "LB2", U_E: "LB2", L_1: "LB2"}},
    },
    "aliases": {"L_1": L_1},
    "tunnels": [],
}

# Define the six policies of the motivating example

FIXTURE_POLICIES: str = """\
# Internet client u_e to a tier-1 application: the public address L_1 lives on LB1, which rewrites the
# destination to u1, so the packet is reborn at LB1 and governed by P2 from there on
policy P1: [u_e, L_1, *, 80, TCP] scope {LB1, F1, CE, S1, u_e} waypoints [F1 -> LB1] occur {F1 == 1, LB1 == 1}
policy P2: [u_e, u1, *, 80, TCP] from LB1 scope {LB1, IPS1, S3, u1} waypoints [IPS1] occur {IPS1 > 0}

# Tier-1 application server u1 replying to the Internet client: LB1 rewrites the source to L_1
policy P3: [u1, u_e, 80, *, TCP] to LB1 scope {LB1, IPS1, S3, u1} waypoints [LB1, IPS1] occur {LB1 == 1, IPS1 > 0}
policy P4: [L_1, u_e, 80, *, TCP] from LB1 scope {LB1, F1, CE, S1, u_e} waypoints [] occur {}

# Tier-1 application server u1 talking to the tier-2 server u2
policy P5: [u1, u2, *, *, TCP] scope {u1, u2, F2, LB2, IPS2, S1, S2, S3, S4, IPS1, LB1} waypoints [F2 -> LB2 -> IPS2] occur {F2 == 1, LB2 == 1, IPS2 > 0}

# Tier-1 server u1 in subnet 1 talking to tier-1 server v1 in subnet 2
policy P6: [u1, v1, *, *, TCP] scope {u1, v1, IPS1, S3} waypoints [IPS1] occur {IPS1 > 0}
"""


def fixture_document() -> dict:
    """
    A fresh copy of the motivating example topology document, free to be modified.
    """
    return copy.deepcopy(_FIXTURE_DOCUMENT)


def fixture_motivating_example() -> tuple:
    """
    Build the motivating example: the enterprise network with its remote data center site and the six policies
    governing it. The network is wired so that all six policies hold and every other host pair is filtered.

    :return: (Topology, PolicySet)
    """
    topology: Topology = build_topology(fixture_document())
    return topology, parse_policy_set(FIXTURE_POLICIES, topology)
