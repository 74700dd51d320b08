#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import dataclasses
import enum
import functools
import ipaddress
import logging
import typing

# Import required src

from netmigrate.errors import AmbiguousMatchError, ContractError

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define header positions, in the order they are written inside brackets

HEADER_FIELDS: tuple = ("src", "dst", "sport", "dport", "proto")


@functools.lru_cache(maxsize=65536)
def address_in(address: str, pattern: str) -> bool:
    """
    Check whether the given address falls under the given pattern. A pattern is either an address (exact match)
    or a prefix in CIDR notation. Tokens which are not IP addresses only match themselves.

    :param address: the concrete address to test
    :param pattern: the address or prefix to test against
    :return: True if the address is covered by the pattern
    """
    if address == pattern:
        return True
    try:
        return ipaddress.ip_address(address) in ipaddress.ip_network(pattern, strict=False)
    except ValueError:
        return False


@dataclasses.dataclass(frozen=True)
class PacketHeader:
    """
    The five header positions of a packet. Ports may be None only in headers which are not simulated.
    """
    src: str
    dst: str
    sport: typing.Optional[int]
    dport: typing.Optional[int]
    proto: str

    @property
    def concrete(self) -> bool:
        return all(value not in (None, "*") for value in (self.src, self.dst, self.proto))

    def replace(self, **changes) -> "PacketHeader":
        return dataclasses.replace(self, **changes)

    def __str__(self) -> str:
        return (self.src + ":" + _port_text(self.sport) + "->" + self.dst + ":" + _port_text(self.dport) + "/" + self.proto)


def _port_text(port: typing.Optional[int]) -> str:
    return "*" if port is None else str(port)


@dataclasses.dataclass(frozen=True)
class PacketClass:
    """
    A header pattern: every position is either None (wildcard) or a value. Addresses may be prefixes.
    When origin_constraint is set, only packets injected (or reborn through a rewrite) at that node match.
    """
    src: typing.Optional[str] = None
    dst: typing.Optional[str] = None
    sport: typing.Optional[int] = None
    dport: typing.Optional[int] = None
    proto: typing.Optional[str] = None
    origin_constraint: typing.Optional[str] = None

    def matches(self,
                header: PacketHeader,
                origin: typing.Optional[str] = None) -> bool:
        """
        Check whether the given concrete header, injected at the given origin, belongs to this class.

        :param header: the concrete header
        :param origin: the injection or rewrite point of the packet, if known
        :return: True if every non-wildcard position agrees with the header
        """
        if self.src is not None and not address_in(header.src, self.src):
            return False
        if self.dst is not None and not address_in(header.dst, self.dst):
            return False
        if self.sport is not None and header.sport != self.sport:
            return False
        if self.dport is not None and header.dport != self.dport:
            return False
        if self.proto is not None and header.proto != self.proto:
            return False
        if self.origin_constraint is not None and origin != self.origin_constraint:
            return False
        return True

    @property
    def specificity(self) -> tuple:
        """
        Number of non-wildcard header positions, then whether an origin is required.
        """
        fields: int = sum(1 for name in HEADER_FIELDS if getattr(self, name) is not None)
        return fields, 1 if self.origin_constraint is not None else 0


# Define occurrence relation

class Relation(enum.Enum):
    EQ = "=="
    GE = ">="
    LE = "<="


@dataclasses.dataclass(frozen=True)
class OccurrenceConstraint:
    """
    Constraint of the form occur(sigma, node) <relation> count.
    """
    node: str
    relation: Relation
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ContractError("occurrence count must be non-negative, got " + str(self.count))
        if self.relation is Relation.GE and self.count == 0:
            raise ContractError("vacuous occurrence constraint " + self.node + " >= 0")

    def holds(self, observed: int) -> bool:
        if self.relation is Relation.EQ:
            return observed == self.count
        if self.relation is Relation.GE:
            return observed >= self.count
        return observed <= self.count

    def __str__(self) -> str:
        return self.node + " " + self.relation.value + " " + str(self.count)


@dataclasses.dataclass(frozen=True)
class WaypointSpec:
    """
    Waypoints of a policy, with ordering (precedence pairs) and occurrence constraints on them.
    """
    waypoints: tuple = ()
    precedence: frozenset = frozenset()
    occurrence: tuple = ()

    def __post_init__(self):
        members: set = set(self.waypoints)
        for first, second in self.precedence:
            if first not in members or second not in members:
                raise ContractError("precedence " + first + " -> " + second + " names a node outside the waypoints")
        for constraint in self.occurrence:
            if constraint.node not in members:
                raise ContractError("occurrence constraint on non-waypoint node " + constraint.node)
        cycle: typing.Optional[list] = find_precedence_cycle(self.precedence)
        if cycle is not None:
            raise ContractError("cyclic precedence: " + " -> ".join(cycle))

    @property
    def empty(self) -> bool:
        return not self.waypoints

    def constraints_on(self, node: str) -> list:
        return [constraint for constraint in self.occurrence if constraint.node == node]

    def permits_absence(self, node: str) -> bool:
        """
        A waypoint may be absent only when it carries occurrence constraints and all of them accept zero visits.
        """
        constraints: list = self.constraints_on(node)
        return bool(constraints) and all(constraint.holds(0) for constraint in constraints)


def find_precedence_cycle(pairs: typing.Iterable) -> typing.Optional[list]:
    """
    Find a cycle in a precedence relation given as (before, after) pairs.

    :param pairs: iterable of ordered node pairs
    :return: the nodes of one cycle (first node repeated at the end) or None if the relation is acyclic
    """
    successors: dict = {}
    for first, second in sorted(pairs):
        successors.setdefault(first, []).append(second)
    state: dict = {}
    stack: list = []

    def visit(node: str) -> typing.Optional[list]:
        state[node] = 1
        stack.append(node)
        for successor in successors.get(node, []):
            if state.get(successor) == 1:
                return stack[stack.index(successor):] + [successor]
            if successor not in state:
                found: typing.Optional[list] = visit(successor)
                if found is not None:
                    return found
        stack.pop()
        state[node] = 2
        return None

    for start in sorted(successors):
        if start not in state:
            cycle: typing.Optional[list] = visit(start)
            if cycle is not None:
                return cycle
    return None


@dataclasses.dataclass(frozen=True)
class Policy:
    """
    A packet policy: the packet class it governs, where the packet must end up, which nodes it must visit on the
    way and the maximum set of nodes allowed to see it.
    """
    id: str
    packet_class: PacketClass
    destination: typing.Optional[str]
    waypoint_spec: WaypointSpec
    scope: frozenset

    def __post_init__(self):
        if not self.scope:
            raise ContractError("policy " + self.id + " has an empty scope")
        outside: list = sorted(set(self.waypoint_spec.waypoints) - self.scope)
        if outside:
            raise ContractError("policy " + self.id + " has waypoints outside its scope: " + ", ".join(outside))


class DefaultDeny:
    """
    Marker for packets governed by no policy: they must be filtered before reaching their destination.
    """

    def __repr__(self) -> str:
        return "DefaultDeny"

    def __eq__(self, other) -> bool:
        return isinstance(other, DefaultDeny)

    def __hash__(self) -> int:
        return hash("DefaultDeny")


DEFAULT_DENY: DefaultDeny = DefaultDeny()


class PolicySet:
    """
    Ordered collection of policies with unique ids. Packets matching none of them are denied, and that default
    cannot be changed.
    """

    def __init__(self, policies: typing.Iterable = ()):
        self._policies: tuple = tuple(policies)
        seen: set = set()
        for policy in self._policies:
            if policy.id in seen:
                raise ContractError("duplicate policy id " + policy.id)
            seen.add(policy.id)
        self._by_id: dict = {policy.id: policy for policy in self._policies}

    @property
    def policies(self) -> tuple:
        return self._policies

    @property
    def default(self) -> DefaultDeny:
        return DEFAULT_DENY

    def get(self, policy_id: str) -> Policy:
        return self._by_id[policy_id]

    def __contains__(self, policy: Policy) -> bool:
        return self._by_id.get(policy.id) == policy

    def __iter__(self):
        return iter(self._policies)

    def __len__(self) -> int:
        return len(self._policies)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolicySet) and self._policies == other._policies

    def __hash__(self) -> int:
        return hash(self._policies)

    def __repr__(self) -> str:
        return "PolicySet(" + ", ".join(policy.id for policy in self._policies) + ")"


# Define policy functions

def match_packet(policy_set: PolicySet,
                 header: PacketHeader, origin: typing.Optional[str]) -> typing.Union[Policy, DefaultDeny]:
    """
    Find the policy governing the given packet. The most specific matching class wins, where specificity is the
    number of non-wildcard header positions with the origin constraint as tiebreaker.

    :param policy_set: the policies to search
    :param header: the concrete packet header
    :param origin: the node where the packet was injected or last rewritten
    :return: the governing Policy, or DEFAULT_DENY when no class matches
    :raises AmbiguousMatchError: when the two most specific matches have equal specificity
    """
    if not header.concrete:
        raise ContractError("cannot match a non-concrete header " + str(header))
    candidates: list = [policy for policy in policy_set if policy.packet_class.matches(header, origin)]
    if not candidates:
        return DEFAULT_DENY
    candidates.sort(key=lambda policy: policy.packet_class.specificity, reverse=True)
    if len(candidates) > 1 and candidates[0].packet_class.specificity == candidates[1].packet_class.specificity:
        raise AmbiguousMatchError(candidates[0].id, candidates[1].id)
    return candidates[0]


def occur(sigma: typing.Sequence, node: str,
          equivalents: typing.Optional[typing.Mapping] = None) -> int:
    """
    Count the visits of the given node in a traversal sequence.

    :param sigma: the traversal sequence
    :param node: the node to count
    :param equivalents: optional mapping node -> nodes counted as the same node (e.g. mirrors of a middlebox)
    :return: the number of occurrences
    """
    accepted: set = {node}
    if equivalents:
        accepted.update(equivalents.get(node, ()))
    return sum(1 for visited in sigma if visited in accepted)


def _first_index(sigma: typing.Sequence, accepted: set) -> int:
    for index, visited in enumerate(sigma):
        if visited in accepted:
            return index
    return -1


# Define verdict classes

@dataclasses.dataclass(frozen=True)
class WaypointFailure:
    """
    One failed waypoint constraint: kind is "missed", "order" or "occurrence".
    """
    kind: str
    nodes: tuple
    message: str


@dataclasses.dataclass(frozen=True)
class WaypointVerdict:
    failures: tuple = ()

    @property
    def satisfied(self) -> bool:
        return not self.failures


@dataclasses.dataclass(frozen=True)
class ScopeVerdict:
    leaks: frozenset = frozenset()

    @property
    def contained(self) -> bool:
        return not self.leaks


def check_waypoints(spec: WaypointSpec,
                    sigma: typing.Sequence,
                    equivalents: typing.Optional[typing.Mapping] = None) -> WaypointVerdict:
    """
    Evaluate the waypoint constraints of a policy over a traversal sequence.
    A waypoint with no occurrence constraint must simply be visited. A precedence pair holds when the first visit
    of the former node comes before the first visit of the latter; it holds vacuously when one of the two is absent
    and its occurrence constraints accept the absence.

    :param spec: the waypoint specification
    :param sigma: the traversal sequence of the delivered packet
    :param equivalents: optional mapping node -> nodes accepted in its place
    :return: a WaypointVerdict listing every failed constraint
    """
    failures: list = []
    for waypoint in spec.waypoints:
        if not spec.constraints_on(waypoint) and occur(sigma, waypoint, equivalents) == 0:
            failures.append(WaypointFailure("missed", (waypoint,), "waypoint " + waypoint + " never visited"))
    for constraint in spec.occurrence:
        observed: int = occur(sigma, constraint.node, equivalents)
        if not constraint.holds(observed):
            failures.append(WaypointFailure("occurrence", (constraint.node,),
                                            "occurrence " + str(constraint) + " required, got " + str(observed)))
    for first, second in sorted(spec.precedence):
        first_index: int = _first_index(sigma, _accepted(first, equivalents))
        second_index: int = _first_index(sigma, _accepted(second, equivalents))
        if first_index >= 0 and second_index >= 0:
            if first_index < second_index:
                continue
        else:
            absent: list = [node for node, index in ((first, first_index), (second, second_index)) if index < 0]
            if all(spec.permits_absence(node) for node in absent):
                continue
        failures.append(WaypointFailure("order", (first, second), "order " + first + " -> " + second + " not respected"))
    return WaypointVerdict(tuple(failures))


def _accepted(node: str, equivalents: typing.Optional[typing.Mapping]) -> set:
    accepted: set = {node}
    if equivalents:
        accepted.update(equivalents.get(node, ()))
    return accepted


def check_scope(scope: typing.AbstractSet, reach: typing.AbstractSet) -> ScopeVerdict:
    """
    Check that every node reached by a packet lies within its scope.

    :param scope: the allowed nodes
    :param reach: the nodes any copy of the packet touched
    :return: a ScopeVerdict carrying the leaked nodes (empty when contained)
    """
    return ScopeVerdict(frozenset(reach) - frozenset(scope))
