#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import collections
import dataclasses
import ipaddress
import logging
import typing

# Import required src

from netmigrate.errors import AmbiguousMatchError, ContractError
from netmigrate.netmodel import NodeKind, Topology
from netmigrate.policy import DEFAULT_DENY, PacketHeader, Policy, PolicySet, address_in, match_packet

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define default simulation and probing constants

DEFAULT_HOP_LIMIT: int = 64
PROBE_PORT: int = 1024
PROBE_PROTO: str = "TCP"
DENY_PROBE_PORTS: tuple = (80,)


# Define forwarding actions

@dataclasses.dataclass(frozen=True)
class Deliver:
    label = "deliver"


@dataclasses.dataclass(frozen=True)
class Forward:
    next: str
    copies: tuple = ()
    label = "forward"


@dataclasses.dataclass(frozen=True)
class Flood:
    targets: tuple
    label = "flood"


@dataclasses.dataclass(frozen=True)
class Drop:
    reason: str
    label = "drop"


@dataclasses.dataclass(frozen=True)
class Rewrite:
    header: PacketHeader
    next: str
    copies: tuple = ()
    label = "rewrite"


# Define traversal result types

@dataclasses.dataclass(frozen=True)
class Outcome:
    """
    How a traversal ended: kind is "delivered", "dropped" or "hop-limit".
    """
    kind: str
    node: typing.Optional[str] = None
    reason: str = ""

    @property
    def delivered(self) -> bool:
        return self.kind == "delivered"

    def __str__(self) -> str:
        if self.kind == "delivered":
            return "Delivered(" + self.node + ")"
        if self.kind == "dropped":
            return "Dropped(" + self.node + ", " + self.reason + ")"
        return "HopLimitExceeded"


@dataclasses.dataclass(frozen=True)
class RewriteEvent:
    """
    A packet rebirth: at the given node (position index in sigma) the header changed from old to new.
    """
    at: str
    old: PacketHeader
    new: PacketHeader
    index: int


@dataclasses.dataclass(frozen=True)
class Segment:
    """
    Part of a traversal travelled under a single header: from the injection (or a rewrite) to the next rewrite
    (or the end). The rewrite node belongs to both adjacent segments.
    """
    index: int
    header: PacketHeader
    origin: str
    sigma: tuple
    reach: frozenset
    last: bool


@dataclasses.dataclass(frozen=True)
class Traversal:
    """
    Result of a simulation: the walk of the delivered copy (or of the copy explaining the failure), every node
    any copy touched, the rewrites along the walk and the outcome.
    """
    inject_at: str
    header: PacketHeader
    sigma: tuple
    reach_set: frozenset
    rewrites: tuple
    outcome: Outcome
    segment_reach: tuple = ()

    def segments(self) -> list:
        """
        Split the walk at every rewrite, pairing each part with its header, origin and copy-union reach.
        """
        segments: list = []
        start: int = 0
        header: PacketHeader = self.header
        origin: str = self.inject_at
        for position, event in enumerate(self.rewrites):
            segments.append(Segment(position, header, origin, self.sigma[start:event.index + 1],
                                    self._reach_at(position), False))
            start, header, origin = event.index, event.new, event.at
        segments.append(Segment(len(self.rewrites), header, origin, self.sigma[start:],
                                self._reach_at(len(self.rewrites)), True))
        return segments

    def _reach_at(self, depth: int) -> frozenset:
        if depth < len(self.segment_reach):
            return self.segment_reach[depth]
        return frozenset()


@dataclasses.dataclass(frozen=True)
class Probe:
    """
    A packet to simulate: injection node, concrete header and the policy it represents (None for deny probes).
    """
    inject_at: str
    header: PacketHeader
    policy_id: typing.Optional[str] = None


# Define forwarding functions

def _other_port(neighbors: tuple, ingress: typing.Optional[str]) -> typing.Optional[str]:
    candidates: list = [neighbor for neighbor in neighbors if neighbor != ingress]
    return candidates[0] if len(candidates) == 1 else None


def forward_step(topology: Topology,
                 at: str, header: PacketHeader,
                 ingress: typing.Optional[str] = None):
    """
    Decide what the given node does with a packet. The decision depends only on the node kind, its forwarding state
    and the packet, using conventional device behaviour only: FIB forwarding with flooding on miss for switches,
    ACL plus longest prefix match for routers, first-match rule lists for middleboxes.

    :param topology: the topology
    :param at: the node holding the packet
    :param header: the concrete packet header
    :param ingress: the neighbor the packet came from, None at injection
    :return: one of Deliver, Forward, Flood, Drop, Rewrite
    """
    node = topology.node(at)
    state = topology.forwarding_of(at)
    neighbors: tuple = topology.neighbors(at)
    if node.kind is NodeKind.HOST:
        if header.dst in node.addresses:
            return Deliver()
        if ingress is None:
            gateway: typing.Optional[str] = state.gateway or (neighbors[0] if neighbors else None)
            return Forward(gateway) if gateway is not None else Drop("isolated")
        return Drop("not-addressed")
    if node.kind is NodeKind.SWITCH:
        next_hop: typing.Optional[str] = state.fib_lookup(header.dst)
        if next_hop is not None:
            return Forward(next_hop) if next_hop != ingress else Drop("same-port")
        if state.uplink is not None and state.uplink != ingress:
            return Forward(state.uplink)
        if state.flood:
            targets: tuple = tuple(neighbor for neighbor in neighbors if neighbor != ingress)
            return Flood(targets) if targets else Drop("no-ports")
        return Drop("fib-miss")
    if node.kind is NodeKind.ROUTER:
        for rule in state.acl:
            if rule.match.matches(header):
                if rule.action == "deny":
                    return Drop("acl")
                break
        if header.dst in node.addresses:
            return Deliver()
        next_hop = state.route_lookup(header.dst)
        return Forward(next_hop) if next_hop is not None else Drop("no-route")
    if node.kind is NodeKind.MIDDLEBOX:
        copies: list = []
        rewritten: PacketHeader = header
        for rule in node.middlebox.rules:
            if not rule.match.matches(header):
                continue
            if rule.action == "copy-to":
                copies.append(rule.target)
                continue
            if rule.action == "deny":
                return Drop("denied by " + node.middlebox.function_class)
            if rule.action == "rewrite-dst":
                rewritten = header.replace(dst=rule.target)
            elif rule.action == "rewrite-src":
                rewritten = header.replace(src=rule.target)
            break
        copies = [target for target in copies if target != ingress]
        if rewritten == header and header.dst in node.addresses:
            return Deliver()
        next_hop = state.route_lookup(rewritten.dst) or _other_port(neighbors, ingress)
        if next_hop is None:
            return Drop("no-route")
        copies = [target for target in copies if target != next_hop]
        if rewritten != header:
            return Rewrite(rewritten, next_hop, tuple(copies))
        return Forward(next_hop, tuple(copies))
    if node.kind is NodeKind.TUNNEL_ENDPOINT:
        peer: typing.Optional[str] = topology.tunnel_peer(at)
        local: tuple = tuple(neighbor for neighbor in neighbors if neighbor != peer)
        if ingress is None or ingress != peer:
            if peer is not None:
                return Forward(peer)
            next_hop = _other_port(neighbors, ingress)
            return Forward(next_hop) if next_hop is not None else Drop("no-route")
        if len(local) == 1:
            return Forward(local[0])
        next_hop = state.fib_lookup(header.dst)
        return Forward(next_hop) if next_hop is not None else Drop("no-route")
    raise ContractError("unsupported node kind " + str(node.kind))


class _Copy:
    """
    One expansion record of the breadth-first simulation. Records are chained through their parent to rebuild walks.
    """
    __slots__ = ("node", "ingress", "header", "depth", "hops", "parent", "copy_id", "rewrite")

    def __init__(self, node, ingress, header, depth, hops, parent, copy_id, rewrite):
        self.node = node
        self.ingress = ingress
        self.header = header
        self.depth = depth
        self.hops = hops
        self.parent = parent
        self.copy_id = copy_id
        self.rewrite = rewrite


def simulate(topology: Topology,
             inject_at: str, header: PacketHeader,
             hop_limit: int = DEFAULT_HOP_LIMIT,
             trace: typing.Optional[list] = None) -> Traversal:
    """
    Simulate a packet injected at a node through the forwarding state of the topology. Flooding forks copies which
    are expanded breadth first. A copy stops when delivered, dropped, when its hop count exceeds the hop limit or
    when it reaches a state (node, ingress, header) already expanded: inside its own lineage that state can only
    repeat forever and counts as exceeding the hop limit, otherwise the copy merges into the earlier one.

    :param topology: the topology
    :param inject_at: the node the packet starts from
    :param header: the concrete header
    :param hop_limit: maximum number of hops for a single copy (at least 1)
    :param trace: optional list receiving one "<copy-id> <node> <action> <header>" line per step
    :return: the Traversal
    """
    if hop_limit < 1:
        raise ContractError("hop limit must be at least 1, got " + str(hop_limit))
    topology.node(inject_at)
    if not header.concrete:
        raise ContractError("cannot simulate a non-concrete header " + str(header))
    records: list = []
    queue: collections.deque = collections.deque([_Copy(inject_at, None, header, 0, 0, None, 0, None)])
    expanded: set = set()
    reach: set = set()
    segment_reach: list = [set()]
    copies_made: int = 1
    budget: int = hop_limit * max(1, len(topology.node_ids))
    delivered: typing.Optional[tuple] = None
    main_end: typing.Optional[tuple] = None
    first_end: typing.Optional[tuple] = None
    exhausted: bool = False
    while queue:
        record: _Copy = queue.popleft()
        key: tuple = (record.node, record.ingress, record.header, record.depth)
        if key in expanded:
            if _in_lineage(records, record.parent, key):
                end: tuple = (record.parent, Outcome("hop-limit"))
                main_end = main_end or (end if record.copy_id == 0 else None)
                first_end = first_end or end
                exhausted = True
            continue
        if len(records) >= budget:
            exhausted = True
            break
        expanded.add(key)
        records.append(record)
        position: int = len(records) - 1
        reach.add(record.node)
        while len(segment_reach) <= record.depth:
            segment_reach.append(set())
        segment_reach[record.depth].add(record.node)
        action = forward_step(topology, record.node, record.header, record.ingress)
        if trace is not None:
            trace.append(str(record.copy_id) + " " + record.node + " " + action.label + " " + str(record.header))
        logger.debug("copy %d at %s: %s %s", record.copy_id, record.node, action.label, record.header)
        end = None
        if isinstance(action, Deliver):
            if delivered is None:
                delivered = (position, Outcome("delivered", record.node))
            end = (position, Outcome("delivered", record.node))
        elif isinstance(action, Drop):
            end = (position, Outcome("dropped", record.node, action.reason))
        else:
            if isinstance(action, Flood):
                branches: list = list(action.targets)
            else:
                branches = [action.next] + list(action.copies)
            new_header: PacketHeader = action.header if isinstance(action, Rewrite) else record.header
            if record.hops + 1 > hop_limit:
                end = (position, Outcome("hop-limit"))
                exhausted = True
            else:
                for branch_number, target in enumerate(branches):
                    copy_id: int = record.copy_id
                    if branch_number > 0:
                        copy_id = copies_made
                        copies_made += 1
                    if isinstance(action, Rewrite) and branch_number == 0:
                        queue.append(_Copy(target, record.node, new_header, record.depth + 1, record.hops + 1,
                                           position, copy_id, RewriteEvent(record.node, record.header, new_header, -1)))
                    else:
                        queue.append(_Copy(target, record.node, record.header, record.depth, record.hops + 1,
                                           position, copy_id, None))
        if end is not None:
            if record.copy_id == 0 and main_end is None:
                main_end = end
            if first_end is None:
                first_end = end
    if delivered is not None:
        chosen: tuple = delivered
    elif main_end is not None:
        chosen = main_end
    elif first_end is not None:
        chosen = first_end
    else:
        chosen = (len(records) - 1, Outcome("hop-limit"))
    if exhausted:
        logger.debug("simulation from %s of %s hit the hop limit", inject_at, header)
    sigma, rewrites = _walk(records, chosen[0])
    return Traversal(inject_at, header, sigma, frozenset(reach), rewrites, chosen[1],
                     tuple(frozenset(nodes) for nodes in segment_reach))


def _in_lineage(records: list, position: typing.Optional[int], key: tuple) -> bool:
    while position is not None:
        record: _Copy = records[position]
        if (record.node, record.ingress, record.header, record.depth) == key:
            return True
        position = record.parent
    return False


def _walk(records: list, position: int) -> tuple:
    chain: list = []
    while position is not None and position >= 0:
        chain.append(records[position])
        position = records[position].parent
    chain.reverse()
    sigma: tuple = tuple(record.node for record in chain)
    rewrites: list = []
    for index, record in enumerate(chain):
        if record.rewrite is not None:
            rewrites.append(RewriteEvent(record.rewrite.at, record.rewrite.old, record.rewrite.new, index - 1))
    return sigma, tuple(rewrites)


# Define probing functions

def _concrete_address(topology: Topology, pattern: str) -> str:
    if "/" not in pattern:
        return pattern
    for host in topology.hosts():
        for address in topology.node(host).addresses:
            if address_in(address, pattern):
                return address
    network = ipaddress.ip_network(pattern, strict=False)
    return str(next(network.hosts(), network.network_address))


def policy_probe(policy: Policy, topology: Topology) -> Probe:
    """
    Build the representative probe of a policy: wildcards are instantiated with fixed values so that reports are
    reproducible (ports 1024, protocol TCP, addresses of the first suitable hosts in the policy scope).

    :param policy: the policy
    :param topology: the topology the probe runs on
    :return: the Probe
    """
    packet_class = policy.packet_class
    scope_hosts: list = [node_id for node_id in sorted(policy.scope)
                         if topology.has_node(node_id) and topology.node(node_id).kind is NodeKind.HOST]
    if packet_class.src is not None:
        src: str = _concrete_address(topology, packet_class.src)
    elif packet_class.origin_constraint is not None and topology.node(packet_class.origin_constraint).addresses:
        src = topology.node(packet_class.origin_constraint).addresses[0]
    else:
        src = topology.node(scope_hosts[0] if scope_hosts else topology.hosts()[0]).addresses[0]
    if packet_class.dst is not None:
        dst: str = _concrete_address(topology, packet_class.dst)
    else:
        source_host: typing.Optional[str] = topology.host_for(src)
        others: list = [host for host in (scope_hosts or list(topology.hosts())) if host != source_host]
        dst = topology.node(others[0]).addresses[0] if others else src
    header: PacketHeader = PacketHeader(src, dst,
                                        PROBE_PORT if packet_class.sport is None else packet_class.sport,
                                        PROBE_PORT if packet_class.dport is None else packet_class.dport,
                                        packet_class.proto or PROBE_PROTO)
    inject_at: typing.Optional[str] = packet_class.origin_constraint or topology.node_for(src)
    if inject_at is None:
        raise ContractError("policy " + policy.id + " has no injection point for source " + src)
    return Probe(inject_at, header, policy.id)


def classify_deny_headers(policy_set: PolicySet, topology: Topology,
                          ports: typing.Iterable = DENY_PROBE_PORTS) -> tuple:
    """
    Match one TCP header per ordered host pair and port against the policy set. Headers matching no policy become
    default-deny probes; headers two policies claim with equal specificity are reported, never dropped.

    :param policy_set: the policies
    :param topology: the topology
    :param ports: destination ports of the headers
    :return: (list of Probe governed by the default deny, list of "probe <src>-><dst>:<port>: <ambiguity>" strings)
    """
    probes: list = []
    ambiguities: list = []
    hosts: tuple = topology.hosts()
    for source in hosts:
        for destination in hosts:
            if source == destination:
                continue
            for port in ports:
                header: PacketHeader = PacketHeader(topology.node(source).addresses[0],
                                                    topology.node(destination).addresses[0],
                                                    PROBE_PORT, int(port), PROBE_PROTO)
                try:
                    governing = match_packet(policy_set, header, source)
                except AmbiguousMatchError as error:
                    logger.warning("deny probe %s -> %s:%d: %s", source, destination, int(port), error)
                    ambiguities.append("probe " + source + "->" + destination + ":" + str(int(port)) + ": " +
                                       str(error))
                    continue
                if governing is DEFAULT_DENY:
                    probes.append(Probe(source, header, None))
    return probes, ambiguities


def deny_probes(policy_set: PolicySet, topology: Topology,
                ports: typing.Iterable = DENY_PROBE_PORTS) -> list:
    """
    Probes for default-deny checking: one TCP header per ordered host pair and port, kept only when no policy
    matches it.
    """
    return classify_deny_headers(policy_set, topology, ports)[0]


def probe_headers(policy_set: PolicySet, topology: Topology,
                  deny_ports: typing.Iterable = DENY_PROBE_PORTS) -> list:
    """
    Every probe needed to check a policy set: one representative per policy followed by the default-deny probes.

    :param policy_set: the policies
    :param topology: the topology
    :param deny_ports: destination ports used for default-deny probes
    :return: list of Probe (inject_at, header, policy_id)
    """
    probes: list = [policy_probe(policy, topology) for policy in policy_set]
    return probes + deny_probes(policy_set, topology, deny_ports)


def tunnel_crossings(topology: Topology, sigma: typing.Sequence) -> int:
    """
    Number of tunnel traversals in a walk, i.e. consecutive steps between the two endpoints of a tunnel.
    """
    return sum(1 for first, second in zip(sigma, sigma[1:]) if topology.is_tunnel_hop(first, second))
