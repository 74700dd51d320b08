#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import dataclasses
import logging
import typing

import numpy

# Import required src

from netmigrate.check import ViolationReport
from netmigrate.errors import NetMigrateError, ScenarioError
from netmigrate.functions import check_all
from netmigrate.netmodel import Flexibility, NodeKind, Topology, build_topology
from netmigrate.policy import OccurrenceConstraint, PacketClass, PacketHeader, Policy, PolicySet, Relation, \
    WaypointSpec
from netmigrate.traversal import PROBE_PORT, PROBE_PROTO, Traversal, simulate

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define generation constants

RETRY_BOUND: int = 8
SERVICE_PORT: int = 80
CLIENT: str = "u_e"
CLIENT_ADDRESS: str = "198.51.100.10"
REMOTE_SITE: str = "DC"


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """
    Parameters of a synthetic campus scenario. Identical parameters always give the identical scenario.

    Attributes:
        - seed: the seed of the pseudo-random generator
        - subnets: number of subnets, each behind its own access switch
        - hosts_per_subnet: number of servers per subnet
        - middlebox_density: probability of placing each optional middlebox (subnet firewall, load balancer, inline IPS)
        - policies_per_subnet: number of intended flows towards each subnet opened in the core ACL and firewalls
        - migrate_fraction: fraction of servers relocated into the data center
        - restricted: whether the data center rejects middleboxes
    """
    seed: int = 1
    subnets: int = 2
    hosts_per_subnet: int = 2
    middlebox_density: float = 0.5
    policies_per_subnet: int = 2
    migrate_fraction: float = 0.5
    restricted: bool = False

    def __post_init__(self):
        for name in ("subnets", "hosts_per_subnet", "policies_per_subnet"):
            if getattr(self, name) < 1:
                raise ScenarioError(name + " must be at least 1, got " + str(getattr(self, name)))
        if not 0.0 <= self.middlebox_density <= 1.0:
            raise ScenarioError("middlebox_density must lie in [0, 1], got " + str(self.middlebox_density))
        if not 0.0 < self.migrate_fraction <= 1.0:
            raise ScenarioError("migrate_fraction must lie in (0, 1], got " + str(self.migrate_fraction))
        if not 0 <= self.seed < 2 ** 64:
            raise ScenarioError("seed must be a 64-bit unsigned integer, got " + str(self.seed))

    @property
    def scenario_id(self) -> str:
        return "s{}-n{}-h{}-d{:g}-p{}-m{:g}{}".format(self.seed, self.subnets, self.hosts_per_subnet,
                                                      self.middlebox_density, self.policies_per_subnet,
                                                      self.migrate_fraction, "-r" if self.restricted else "")


def _random_state(seed: int, stream: int) -> numpy.random.RandomState:
    # RandomState seeds are 32-bit words: split the 64-bit seed and append the stream number
    return numpy.random.RandomState([seed & 0xFFFFFFFF, seed >> 32, stream])


def _host_address(subnet: int, index: int) -> str:
    return "10." + str(subnet) + ".1." + str(10 + index)


def _draw_campus(config: ScenarioConfig, random_state: numpy.random.RandomState) -> dict:
    """
    Draw a campus document: client u_e behind the edge router CE, a core router CORE with a default-deny ACL and,
    per subnet, an optional firewall and load balancer in front of the access switch, servers attached directly or
    behind an inline IPS.
    """
    sites: list = [{"id": "ENT", "kind": "enterprise", "flexibility": "full"},
                   {"id": REMOTE_SITE, "kind": "remote-dc",
                    "flexibility": (Flexibility.RESTRICTED if config.restricted else Flexibility.FULL).value}]
    nodes: list = [{"id": CLIENT, "kind": "host", "site": "ENT", "addresses": [CLIENT_ADDRESS]},
                   {"id": "CE", "kind": "router", "site": "ENT", "addresses": []},
                   {"id": "CORE", "kind": "router", "site": "ENT", "addresses": []}]
    links: list = [[CLIENT, "CE"], ["CE", "CORE"]]
    forwarding: dict = {"CE": {"routes": [[CLIENT_ADDRESS + "/32", CLIENT], ["10.0.0.0/8", "CORE"]]},
                        "CORE": {"routes": [["0.0.0.0/0", "CE"]], "acl": []}}
    subnet_hosts: dict = {}
    firewalls: dict = {}
    for subnet in range(1, config.subnets + 1):
        chain: list = ["CORE"]
        if random_state.rand() < config.middlebox_density:
            firewalls[subnet] = "F" + str(subnet)
            nodes.append({"id": firewalls[subnet], "kind": "middlebox", "site": "ENT", "addresses": [],
                          "middlebox": {"class": "Firewall", "rules": []}})
            chain.append(firewalls[subnet])
        if random_state.rand() < config.middlebox_density:
            balancer: str = "LB" + str(subnet)
            nodes.append({"id": balancer, "kind": "middlebox", "site": "ENT", "addresses": [],
                          "middlebox": {"class": "LoadBalancer", "rules": [{"match": {}, "action": "allow"}]}})
            chain.append(balancer)
        switch: str = "SW" + str(subnet)
        nodes.append({"id": switch, "kind": "switch", "site": "ENT", "addresses": []})
        chain.append(switch)
        links.extend([first, second] for first, second in zip(chain, chain[1:]))
        forwarding["CORE"]["routes"].insert(0, ["10." + str(subnet) + ".0.0/16", chain[1]])
        fib: dict = {}
        subnet_hosts[subnet] = []
        for index in range(1, config.hosts_per_subnet + 1):
            host: str = "h" + str(subnet) + "_" + str(index)
            address: str = _host_address(subnet, index)
            nodes.append({"id": host, "kind": "host", "site": "ENT", "addresses": [address]})
            subnet_hosts[subnet].append((host, address))
            if random_state.rand() < config.middlebox_density:
                ips: str = "IPS" + str(subnet) + "_" + str(index)
                nodes.append({"id": ips, "kind": "middlebox", "site": "ENT", "addresses": [],
                              "middlebox": {"class": "IPS", "rules": [{"match": {"proto": PROBE_PROTO}, "action": "allow"},
                                                                      {"match": {}, "action": "deny"}]}})
                links.extend([[switch, ips], [ips, host]])
                fib[address] = ips
            else:
                links.append([switch, host])
                fib[address] = host
        forwarding[switch] = {"fib": fib, "flood": False, "uplink": chain[-2]}
    # Intended flows towards each subnet, opened in the core ACL and the firewalls on their way
    addresses: dict = {CLIENT: CLIENT_ADDRESS}
    for hosts in subnet_hosts.values():
        addresses.update(hosts)
    flows: set = set()
    for subnet, hosts in sorted(subnet_hosts.items()):
        sources: list = [CLIENT] + [host for other, members in sorted(subnet_hosts.items()) if other != subnet
                                    for host, _ in members]
        for _ in range(config.policies_per_subnet):
            source: str = sources[random_state.randint(len(sources))]
            destination: str = hosts[random_state.randint(len(hosts))][0]
            flows.add((source, destination))
    host_subnet: dict = {host: subnet for subnet, hosts in subnet_hosts.items() for host, _ in hosts}
    firewall_rules: dict = {subnet: [] for subnet in firewalls}
    for source, destination in sorted(flows):
        rule: dict = {"match": {"src": addresses[source], "dst": addresses[destination], "dport": SERVICE_PORT,
                                "proto": PROBE_PROTO}, "action": "allow"}
        forwarding["CORE"]["acl"].append(rule)
        for subnet in {host_subnet.get(source), host_subnet.get(destination)}:
            if subnet in firewall_rules:
                firewall_rules[subnet].append(rule)
    forwarding["CORE"]["acl"].append({"match": {}, "action": "deny"})
    for node in nodes:
        if node["kind"] == "middlebox" and node["middlebox"]["class"] == "Firewall":
            subnet = int(node["id"][1:])
            node["middlebox"]["rules"] = firewall_rules[subnet] + [{"match": {}, "action": "deny"}]
    return {"sites": sites, "nodes": nodes, "links": links, "forwarding": forwarding, "aliases": {}, "tunnels": []}


def _derive_policies(topology: Topology) -> PolicySet:
    """
    Turn every delivered service flow of the campus into a policy: the middleboxes met on the way become ordered
    waypoints (firewalls and load balancers exactly once, IPS at least once) and the nodes reached become the scope.
    """
    policies: list = []
    sources: list = [CLIENT] + [host for host in topology.hosts() if host != CLIENT]
    destinations: list = [host for host in topology.hosts() if host != CLIENT]
    for source in sources:
        for destination in destinations:
            if source == destination:
                continue
            source_address: str = topology.node(source).addresses[0]
            destination_address: str = topology.node(destination).addresses[0]
            header: PacketHeader = PacketHeader(source_address, destination_address, PROBE_PORT, SERVICE_PORT,
                                                PROBE_PROTO)
            traversal: Traversal = simulate(topology, source, header)
            if not traversal.outcome.delivered or traversal.outcome.node != destination:
                continue
            waypoints: list = []
            for node_id in traversal.sigma:
                if topology.node(node_id).kind is NodeKind.MIDDLEBOX and node_id not in waypoints:
                    waypoints.append(node_id)
            occurrence: tuple = tuple(OccurrenceConstraint(node_id, Relation.GE, 1)
                                      if topology.node(node_id).middlebox.function_class == "IPS"
                                      else OccurrenceConstraint(node_id, Relation.EQ, 1) for node_id in waypoints)
            spec: WaypointSpec = WaypointSpec(tuple(waypoints), frozenset(zip(waypoints, waypoints[1:])), occurrence)
            policies.append(Policy("P" + str(len(policies) + 1),
                                   PacketClass(source_address, destination_address, None, SERVICE_PORT, PROBE_PROTO),
                                   destination, spec, frozenset(traversal.reach_set)))
    return PolicySet(policies)


def gen_campus(config: ScenarioConfig) -> tuple:
    """
    Generate a deterministic pseudo-random campus and the policies it enforces. Generation is retried with fresh
    draws until the checker finds the pair conformant.

    :param config: the ScenarioConfig
    :return: (Topology, PolicySet)
    :raises ScenarioError: when no conformant campus is reached within the retry bound
    """
    random_state: numpy.random.RandomState = _random_state(config.seed, 0)
    diagnostics: str = ""
    for attempt in range(RETRY_BOUND):
        try:
            topology: Topology = build_topology(_draw_campus(config, random_state))
            policy_set: PolicySet = _derive_policies(topology)
            report: ViolationReport = check_all(topology, policy_set)
        except NetMigrateError as error:
            diagnostics = str(error)
            logger.warning("campus %s attempt %d failed: %s", config.scenario_id, attempt + 1, error)
            continue
        if report.total == 0 and not report.configuration_errors:
            logger.info("campus %s: %d nodes, %d policies after %d attempts", config.scenario_id,
                        len(topology.node_ids), len(policy_set), attempt + 1)
            return topology, policy_set
        diagnostics = report.to_text()
        logger.warning("campus %s attempt %d is not conformant: %d violations", config.scenario_id, attempt + 1,
                       report.total)
    raise ScenarioError("campus " + config.scenario_id + " not conformant after " + str(RETRY_BOUND) +
                        " attempts:\n" + diagnostics)


def pick_migrated(config: ScenarioConfig, topology: Topology) -> list:
    """
    Deterministically choose the servers to relocate: the configured fraction of them, at least one.
    """
    servers: list = sorted(host for host in topology.hosts() if host != CLIENT)
    count: int = min(len(servers), max(1, int(round(config.migrate_fraction * len(servers)))))
    chosen: numpy.ndarray = _random_state(config.seed, 1).choice(len(servers), size=count, replace=False)
    return sorted(servers[index] for index in chosen)


def sweep(base: ScenarioConfig, trials: int) -> list:
    """
    The configurations of an evaluation sweep: the base configuration with consecutive seeds.
    """
    if trials < 0:
        raise ScenarioError("trials must be non-negative, got " + str(trials))
    return [dataclasses.replace(base, seed=base.seed + trial) for trial in range(trials)]


def scenario_summary(topology: Topology, policy_set: PolicySet) -> typing.Dict[str, int]:
    return {"nodes": len(topology.node_ids), "links": len(topology.links), "policies": len(policy_set),
            "middleboxes": len(topology.nodes_of_kind(NodeKind.MIDDLEBOX))}
