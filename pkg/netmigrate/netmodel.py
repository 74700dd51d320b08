#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import copy
import dataclasses
import enum
import ipaddress
import logging
import typing

import numpy
import scipy.sparse
import scipy.sparse.csgraph

# Import required src

from netmigrate.errors import ContractError, TopologyError, UnknownNodeError
from netmigrate.policy import PacketClass, address_in

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)


# Define enumerations

class SiteKind(enum.Enum):
    ENTERPRISE = "enterprise"
    REMOTE_DC = "remote-dc"


class Flexibility(enum.Enum):
    FULL = "full"
    RESTRICTED = "restricted"


class NodeKind(enum.Enum):
    HOST = "host"
    SWITCH = "switch"
    ROUTER = "router"
    MIDDLEBOX = "middlebox"
    TUNNEL_ENDPOINT = "tunnel-endpoint"


# Define the known middlebox function classes, any other name is an Other(name) class

FUNCTION_CLASSES: tuple = ("Firewall", "LoadBalancer", "IPS", "Sniffer")

# Define rule actions: copy-to is the only non-terminal one

RULE_ACTIONS: tuple = ("allow", "deny", "rewrite-dst", "rewrite-src", "copy-to")


# Define value types

@dataclasses.dataclass(frozen=True)
class Rule:
    """
    A single middlebox or ACL rule: packets matching the pattern get the action. Rewrite actions carry the new
    address as target, copy-to carries the node receiving the copy.
    """
    match: PacketClass
    action: str
    target: typing.Optional[str] = None

    @property
    def terminal(self) -> bool:
        return self.action != "copy-to"


@dataclasses.dataclass(frozen=True)
class MiddleboxSpec:
    """
    Identity of a middlebox: its function class and its configuration state, the canonical ordered rule list.
    """
    function_class: str
    rules: tuple = ()

    def equivalent(self, other: "MiddleboxSpec") -> bool:
        return self.function_class == other.function_class and self.rules == other.rules


@dataclasses.dataclass(frozen=True)
class Site:
    id: str
    kind: SiteKind
    flexibility: Flexibility = Flexibility.FULL


@dataclasses.dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    site: str
    addresses: tuple = ()
    middlebox: typing.Optional[MiddleboxSpec] = None


@dataclasses.dataclass(frozen=True)
class ForwardingState:
    """
    Forwarding state of a single node. Which fields are meaningful depends on the node kind:
    switches use fib, flood and uplink; routers use routes and acl; middleboxes use routes; hosts use gateway.
    """
    fib: tuple = ()
    flood: bool = True
    uplink: typing.Optional[str] = None
    routes: tuple = ()
    acl: tuple = ()
    gateway: typing.Optional[str] = None

    def fib_lookup(self, address: str) -> typing.Optional[str]:
        for key, neighbor in self.fib:
            if key == address:
                return neighbor
        return None

    def route_lookup(self, address: str) -> typing.Optional[str]:
        """
        Longest prefix match over the routes; among equal prefix lengths the first listed route wins.
        """
        best: typing.Optional[str] = None
        best_length: int = -1
        for prefix, neighbor in self.routes:
            if address_in(address, prefix):
                length: int = _prefix_length(prefix)
                if length > best_length:
                    best, best_length = neighbor, length
        return best

    def next_hops(self) -> set:
        hops: set = {neighbor for _, neighbor in self.fib}
        hops.update(neighbor for _, neighbor in self.routes)
        hops.update(hop for hop in (self.uplink, self.gateway) if hop is not None)
        return hops

    @property
    def is_default(self) -> bool:
        return self == ForwardingState()


@dataclasses.dataclass(frozen=True)
class Tunnel:
    a: str
    b: str
    encrypted: bool = True


@dataclasses.dataclass(frozen=True)
class Issue:
    """
    A validation finding, severity is "error" or "warning".
    """
    severity: str
    message: str

    def __str__(self) -> str:
        return self.severity + ": " + self.message


def _prefix_length(prefix: str) -> int:
    try:
        return ipaddress.ip_network(prefix, strict=False).prefixlen
    except ValueError:
        return 0


def _canonical_address(pattern: typing.Optional[str]) -> typing.Optional[str]:
    if pattern is None or pattern == "*":
        return None
    if "/" in pattern:
        try:
            return str(ipaddress.ip_network(pattern, strict=False))
        except ValueError:
            return pattern
    return pattern


def _canonical_port(port) -> typing.Optional[int]:
    if port is None or port == "*":
        return None
    return int(port)


def parse_match(document: typing.Optional[dict]) -> PacketClass:
    """
    Build a canonical header pattern from its document form (missing keys and "*" are wildcards).

    :param document: dict with optional keys src, dst, sport, dport, proto, origin
    :return: the canonical PacketClass
    """
    document = document or {}
    proto = document.get("proto")
    return PacketClass(src=_canonical_address(document.get("src")),
                       dst=_canonical_address(document.get("dst")),
                       sport=_canonical_port(document.get("sport")),
                       dport=_canonical_port(document.get("dport")),
                       proto=None if proto in (None, "*") else str(proto).upper(),
                       origin_constraint=document.get("origin"))


def render_match(match: PacketClass) -> dict:
    document: dict = {}
    for name in ("src", "dst", "sport", "dport", "proto"):
        value = getattr(match, name)
        if value is not None:
            document[name] = value
    if match.origin_constraint is not None:
        document["origin"] = match.origin_constraint
    return document


def parse_rule(document: dict) -> Rule:
    action: str = str(document.get("action", "")).lower()
    if action == "permit":
        action = "allow"
    if action not in RULE_ACTIONS:
        raise ValueError("unknown rule action " + repr(document.get("action")))
    target: typing.Optional[str] = document.get("target")
    if action in ("rewrite-dst", "rewrite-src", "copy-to") and not target:
        raise ValueError("rule action " + action + " requires a target")
    return Rule(parse_match(document.get("match")), action, target if action != "allow" and action != "deny" else None)


def render_rule(rule: Rule) -> dict:
    document: dict = {"match": render_match(rule.match), "action": rule.action}
    if rule.target is not None:
        document["target"] = rule.target
    return document


# Define topology class

class Topology:
    """
    Immutable enterprise network: sites, nodes, undirected links, per-node forwarding state, address aliases and
    tunnels. Instances are built through build_topology, which guarantees every structural invariant.
    """

    def __init__(self,
                 sites: typing.Iterable, nodes: typing.Iterable, links: typing.Iterable,
                 forwarding: typing.Mapping, aliases: typing.Mapping, tunnels: typing.Iterable):
        self._sites: dict = {site.id: site for site in sorted(sites, key=lambda site: site.id)}
        self._nodes: dict = {node.id: node for node in sorted(nodes, key=lambda node: node.id)}
        self._links: tuple = tuple(sorted({tuple(sorted(link)) for link in links}))
        self._forwarding: dict = {node_id: forwarding[node_id] for node_id in sorted(forwarding) if not forwarding[node_id].is_default}
        self._aliases: dict = {name: aliases[name] for name in sorted(aliases)}
        self._tunnels: tuple = tuple(sorted(tunnels, key=lambda tunnel: (tunnel.a, tunnel.b)))
        # Define cache attributes
        self._adjacency: dict = {node_id: [] for node_id in self._nodes}
        for first, second in self._links:
            self._adjacency[first].append(second)
            self._adjacency[second].append(first)
        self._adjacency = {node_id: tuple(sorted(neighbors)) for node_id, neighbors in self._adjacency.items()}
        self._owners: dict = {}
        for node in self._nodes.values():
            for address in node.addresses:
                self._owners.setdefault(address, []).append(node.id)
        self._peers: dict = {}
        for tunnel in self._tunnels:
            self._peers[tunnel.a] = tunnel
            self._peers[tunnel.b] = tunnel
        self._index: tuple = tuple(self._nodes)

    # Properties

    @property
    def sites(self) -> tuple:
        return tuple(self._sites.values())

    @property
    def nodes(self) -> tuple:
        return tuple(self._nodes.values())

    @property
    def links(self) -> tuple:
        return self._links

    @property
    def forwarding(self) -> dict:
        return dict(self._forwarding)

    @property
    def aliases(self) -> dict:
        return dict(self._aliases)

    @property
    def tunnels(self) -> tuple:
        return self._tunnels

    @property
    def node_ids(self) -> tuple:
        return self._index

    # Lookups

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def site(self, site_id: str) -> Site:
        try:
            return self._sites[site_id]
        except KeyError:
            raise ContractError("unknown site " + repr(site_id)) from None

    @property
    def enterprise_site(self) -> Site:
        return next(site for site in self._sites.values() if site.kind is SiteKind.ENTERPRISE)

    def neighbors(self, node_id: str) -> tuple:
        self.node(node_id)
        return self._adjacency[node_id]

    def linked(self, first: str, second: str) -> bool:
        return second in self._adjacency.get(first, ())

    def forwarding_of(self, node_id: str) -> ForwardingState:
        return self._forwarding.get(node_id, ForwardingState())

    def hosts(self) -> tuple:
        return tuple(node.id for node in self._nodes.values() if node.kind is NodeKind.HOST)

    def nodes_of_kind(self, kind: NodeKind) -> tuple:
        return tuple(node.id for node in self._nodes.values() if node.kind is kind)

    def tunnel_of(self, node_id: str) -> typing.Optional[Tunnel]:
        return self._peers.get(node_id)

    def tunnel_peer(self, node_id: str) -> typing.Optional[str]:
        tunnel: typing.Optional[Tunnel] = self._peers.get(node_id)
        if tunnel is None:
            return None
        return tunnel.b if tunnel.a == node_id else tunnel.a

    def is_tunnel_hop(self, first: str, second: str) -> bool:
        return self.tunnel_peer(first) == second

    def owners(self, address: str) -> tuple:
        return tuple(self._owners.get(address, ()))

    def host_for(self, address: str) -> typing.Optional[str]:
        """
        The Host node owning the given address, or None. Proxies share the address of the host they stand for but
        are never hosts themselves, so the answer is unique in a valid topology.
        """
        for node_id in self._owners.get(address, ()):
            if self._nodes[node_id].kind is NodeKind.HOST:
                return node_id
        return None

    def node_for(self, address: str) -> typing.Optional[str]:
        """
        The node terminating the given address: its host if any, otherwise the first owner.
        """
        host: typing.Optional[str] = self.host_for(address)
        if host is not None:
            return host
        owners: tuple = self.owners(address)
        return owners[0] if owners else None

    def resolve_address(self, token: str) -> typing.Optional[str]:
        """
        Resolve a symbolic name (alias or node id) or literal address to an address.

        :param token: the name or address
        :return: the address, or None when the token names nothing in the topology
        """
        if token in self._aliases:
            return self._aliases[token]
        if token in self._nodes:
            addresses: tuple = self._nodes[token].addresses
            return addresses[0] if addresses else None
        if token in self._owners:
            return token
        try:
            ipaddress.ip_address(token)
            return token
        except ValueError:
            return None

    def name_of(self, address: str) -> str:
        """
        The preferred symbolic name of an address: an alias, else the id of the node whose first address it is.
        """
        for name, aliased in self._aliases.items():
            if aliased == address:
                return name
        node_id: typing.Optional[str] = self.node_for(address)
        if node_id is not None and self._nodes[node_id].addresses[0] == address:
            return node_id
        return address

    def adjacency_matrix(self) -> scipy.sparse.csr_matrix:
        """
        Symmetric adjacency matrix of the link graph, rows and columns ordered as node_ids.
        """
        position: dict = {node_id: index for index, node_id in enumerate(self._index)}
        rows: list = [position[first] for first, second in self._links] + [position[second] for first, second in self._links]
        columns: list = [position[second] for first, second in self._links] + [position[first] for first, second in self._links]
        size: int = len(self._index)
        return scipy.sparse.csr_matrix((numpy.ones(len(rows), dtype=numpy.int8), (rows, columns)), shape=(size, size))

    # Comparison

    def __eq__(self, other) -> bool:
        return isinstance(other, Topology) and render_topology(self) == render_topology(other)

    def __hash__(self) -> int:
        return hash((self._index, self._links))

    def __repr__(self) -> str:
        return "Topology(" + str(len(self._nodes)) + " nodes, " + str(len(self._links)) + " links)"


# Define topology functions

def build_topology(document: dict) -> Topology:
    """
    Build a validated Topology from its JSON document form.

    :param document: dict with keys sites, nodes, links, forwarding and optionally aliases, tunnels
    :return: the Topology
    :raises TopologyError: carrying every structural error found, never a partially valid topology
    """
    errors: list = []
    if not isinstance(document, dict):
        raise TopologyError(["topology document must be an object"])
    # Sites
    sites: list = []
    site_ids: set = set()
    for entry in document.get("sites", []):
        try:
            site: Site = Site(str(entry["id"]), SiteKind(entry.get("kind", "enterprise")),
                              Flexibility(entry.get("flexibility", "full")))
        except (KeyError, ValueError, TypeError) as error:
            errors.append("invalid site entry " + repr(entry) + ": " + str(error))
            continue
        if site.id in site_ids:
            errors.append("duplicate site id " + site.id)
            continue
        site_ids.add(site.id)
        sites.append(site)
    enterprise_count: int = sum(1 for site in sites if site.kind is SiteKind.ENTERPRISE)
    if enterprise_count != 1:
        errors.append("exactly one enterprise site required, found " + str(enterprise_count))
    # Nodes
    raw_nodes: list = document.get("nodes", [])
    if not raw_nodes:
        errors.append("no nodes")
    nodes: dict = {}
    for entry in raw_nodes:
        try:
            node: Node = _parse_node(entry)
        except (KeyError, ValueError, TypeError) as error:
            errors.append("invalid node entry " + repr(entry.get("id") if isinstance(entry, dict) else entry) + ": " + str(error))
            continue
        if node.id in nodes:
            errors.append("duplicate node id " + node.id)
            continue
        if node.site not in site_ids:
            errors.append("node " + node.id + " refers to unknown site " + node.site)
        if node.kind is NodeKind.HOST and not node.addresses:
            errors.append("host " + node.id + " has no address")
        if node.kind is NodeKind.SWITCH and node.addresses:
            errors.append("switch " + node.id + " must not have addresses")
        for address in node.addresses:
            try:
                ipaddress.ip_address(address)
            except ValueError:
                errors.append("node " + node.id + " has invalid address " + repr(address))
        nodes[node.id] = node
    # Links
    links: set = set()
    for entry in document.get("links", []):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            errors.append("invalid link entry " + repr(entry))
            continue
        first, second = str(entry[0]), str(entry[1])
        if first == second:
            errors.append("self link on " + first)
            continue
        for endpoint in (first, second):
            if endpoint not in nodes:
                errors.append("dangling link endpoint " + endpoint + " in link (" + first + ", " + second + ")")
        if first in nodes and second in nodes:
            links.add(tuple(sorted((first, second))))
    adjacency: dict = {node_id: set() for node_id in nodes}
    for first, second in links:
        adjacency[first].add(second)
        adjacency[second].add(first)
    # Aliases
    owned: set = {address for node in nodes.values() for address in node.addresses}
    aliases: dict = {}
    for name, address in dict(document.get("aliases", {})).items():
        if address not in owned:
            errors.append("alias " + name + " names address " + str(address) + " owned by no node")
        elif name in nodes:
            errors.append("alias " + name + " shadows a node id")
        else:
            aliases[str(name)] = str(address)
    # Tunnels
    tunnels: list = []
    paired: set = set()
    for entry in document.get("tunnels", []):
        try:
            tunnel: Tunnel = Tunnel(str(entry["a"]), str(entry["b"]), bool(entry.get("encrypted", True)))
        except (KeyError, TypeError) as error:
            errors.append("invalid tunnel entry " + repr(entry) + ": " + str(error))
            continue
        for endpoint in (tunnel.a, tunnel.b):
            if endpoint not in nodes:
                errors.append("tunnel endpoint " + endpoint + " is not a node")
            elif nodes[endpoint].kind is not NodeKind.TUNNEL_ENDPOINT:
                errors.append("tunnel endpoint " + endpoint + " is not a tunnel-endpoint node")
            elif endpoint in paired:
                errors.append("tunnel endpoint " + endpoint + " belongs to two tunnels")
            paired.add(endpoint)
        if tuple(sorted((tunnel.a, tunnel.b))) not in links:
            errors.append("tunnel " + tunnel.a + " <-> " + tunnel.b + " has no link")
        tunnels.append(tunnel)
    # Middlebox rule targets
    for node in nodes.values():
        if node.middlebox is None:
            continue
        for rule in node.middlebox.rules:
            if rule.action in ("rewrite-dst", "rewrite-src") and rule.target not in owned:
                errors.append("middlebox " + node.id + " rewrites to unresolved address " + str(rule.target))
            if rule.action == "copy-to" and rule.target not in adjacency.get(node.id, ()):
                errors.append("middlebox " + node.id + " copies to non-adjacent node " + str(rule.target))
    # Forwarding
    forwarding: dict = {}
    for node_id, entry in dict(document.get("forwarding", {})).items():
        if node_id not in nodes:
            errors.append("forwarding state for unknown node " + node_id)
            continue
        try:
            state: ForwardingState = _parse_forwarding(entry)
        except (KeyError, ValueError, TypeError) as error:
            errors.append("invalid forwarding state for " + node_id + ": " + str(error))
            continue
        for hop in sorted(state.next_hops()):
            if hop not in nodes:
                errors.append("forwarding state of " + node_id + " names unknown node " + hop)
            elif hop not in adjacency[node_id]:
                errors.append("forwarding state of " + node_id + " names non-adjacent node " + hop)
        forwarding[node_id] = state
    if errors:
        raise TopologyError(errors)
    return Topology(sites, nodes.values(), links, forwarding, aliases, tunnels)


def _parse_node(entry: dict) -> Node:
    kind: NodeKind = NodeKind(entry["kind"])
    middlebox: typing.Optional[MiddleboxSpec] = None
    if kind is NodeKind.MIDDLEBOX:
        spec: dict = entry["middlebox"]
        middlebox = MiddleboxSpec(str(spec["class"]), tuple(parse_rule(rule) for rule in spec.get("rules", [])))
    elif entry.get("middlebox") is not None:
        raise ValueError("only middlebox nodes carry a middlebox spec")
    return Node(str(entry["id"]), kind, str(entry["site"]), tuple(str(address) for address in entry.get("addresses", [])), middlebox)


def _parse_forwarding(entry: dict) -> ForwardingState:
    fib: tuple = tuple(sorted((str(address), str(neighbor)) for address, neighbor in dict(entry.get("fib", {})).items()))
    routes: tuple = tuple((_canonical_address(str(prefix)) or "0.0.0.0/0", str(neighbor)) for prefix, neighbor in entry.get("routes", []))
    acl: tuple = tuple(parse_rule(rule) for rule in entry.get("acl", []))
    for rule in acl:
        if rule.action not in ("allow", "deny"):
            raise ValueError("acl rules only permit or deny")
    return ForwardingState(fib=fib, flood=bool(entry.get("flood", True)), uplink=entry.get("uplink"),
                           routes=routes, acl=acl, gateway=entry.get("gateway"))


def render_topology(topology: Topology) -> dict:
    """
    Render a Topology back to its canonical document form; build_topology of the result equals the topology.

    :param topology: the topology to render
    :return: the JSON-serializable document
    """
    nodes: list = []
    for node in topology.nodes:
        entry: dict = {"id": node.id, "kind": node.kind.value, "site": node.site, "addresses": list(node.addresses)}
        if node.middlebox is not None:
            entry["middlebox"] = {"class": node.middlebox.function_class,
                                  "rules": [render_rule(rule) for rule in node.middlebox.rules]}
        nodes.append(entry)
    forwarding: dict = {}
    for node_id, state in topology.forwarding.items():
        entry = {}
        if state.fib:
            entry["fib"] = {address: neighbor for address, neighbor in state.fib}
        if not state.flood:
            entry["flood"] = False
        if state.uplink is not None:
            entry["uplink"] = state.uplink
        if state.routes:
            entry["routes"] = [[prefix, neighbor] for prefix, neighbor in state.routes]
        if state.acl:
            entry["acl"] = [render_rule(rule) for rule in state.acl]
        if state.gateway is not None:
            entry["gateway"] = state.gateway
        forwarding[node_id] = entry
    return {
        "sites": [{"id": site.id, "kind": site.kind.value, "flexibility": site.flexibility.value} for site in topology.sites],
        "nodes": nodes,
        "links": [list(link) for link in topology.links],
        "forwarding": forwarding,
        "aliases": topology.aliases,
        "tunnels": [{"a": tunnel.a, "b": tunnel.b, "encrypted": tunnel.encrypted} for tunnel in topology.tunnels],
    }


def edit_document(topology: Topology) -> dict:
    """
    A deep copy of the topology document, free to be modified and rebuilt.
    """
    return copy.deepcopy(render_topology(topology))


def validate_topology(topology: Topology) -> list:
    """
    Check every topology invariant and report what does not hold. Structural errors cannot occur in a topology
    built through build_topology, so in practice the result carries warnings: address collisions inside a site and
    components unreachable from the enterprise.

    :param topology: the topology to validate
    :return: list of Issue, empty when all invariants hold
    """
    issues: list = []
    site_ids: set = {site.id for site in topology.sites}
    for node in topology.nodes:
        if node.site not in site_ids:
            issues.append(Issue("error", "node " + node.id + " refers to unknown site " + node.site))
        if node.kind is NodeKind.HOST and not node.addresses:
            issues.append(Issue("error", "host " + node.id + " has no address"))
    for node_id, state in topology.forwarding.items():
        for hop in sorted(state.next_hops()):
            if not topology.linked(node_id, hop):
                issues.append(Issue("error", "forwarding state of " + node_id + " names non-adjacent node " + hop))
    # Address collisions per site (a proxy standing in for a relocated host lives in another site than the host)
    seen: dict = {}
    for node in topology.nodes:
        for address in node.addresses:
            key: tuple = (node.site, address)
            if key in seen:
                issues.append(Issue("warning", "address collision on " + address + " in site " + node.site +
                                    " between " + seen[key] + " and " + node.id))
            else:
                seen[key] = node.id
    # Connectivity
    if topology.node_ids:
        count, labels = scipy.sparse.csgraph.connected_components(topology.adjacency_matrix(), directed=False)
        if count > 1:
            sizes: numpy.ndarray = numpy.bincount(labels)
            main: int = int(numpy.argmax(sizes))
            for component in range(count):
                if component == main:
                    continue
                members: list = [node_id for node_id, label in zip(topology.node_ids, labels) if label == component]
                issues.append(Issue("warning", "unreachable component {" + ", ".join(members) + "}"))
    for issue in issues:
        logger.debug("validation %s", issue)
    return issues


def node_equiv(first: Node, second: Node) -> bool:
    """
    Decide whether two middleboxes are interchangeable as waypoints: same function class and same canonical
    configuration state.

    :param first: a middlebox node
    :param second: a middlebox node
    :return: True if the two middleboxes are equivalent
    :raises ContractError: if either node is not a middlebox
    """
    for node in (first, second):
        if node.kind is not NodeKind.MIDDLEBOX or node.middlebox is None:
            raise ContractError("node_equiv requires middleboxes, got " + node.id + " (" + node.kind.value + ")")
    return first.middlebox.equivalent(second.middlebox)


def shortest_paths_from(topology: Topology, source: str) -> tuple:
    """
    Hop distances and predecessors from the given node over the link graph.

    :param topology: the topology
    :param source: the node to start from
    :return: (distances dict node -> hops for reachable nodes, predecessors dict node -> previous node)
    """
    index: int = topology.node_ids.index(topology.node(source).id)
    distances, predecessors = scipy.sparse.csgraph.shortest_path(topology.adjacency_matrix(), directed=False,
                                                                  unweighted=True, indices=index,
                                                                  return_predecessors=True)
    hops: dict = {}
    previous: dict = {}
    for position, node_id in enumerate(topology.node_ids):
        if numpy.isfinite(distances[position]):
            hops[node_id] = int(distances[position])
            if predecessors[position] >= 0:
                previous[node_id] = topology.node_ids[predecessors[position]]
    return hops, previous
