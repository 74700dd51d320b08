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
import ipaddress
import json
import logging
import typing

import numpy

# Import required src

from netmigrate.check import ViolationReport
from netmigrate.errors import AmbiguousMatchError, ContractError, UnknownNodeError
from netmigrate.functions import check_policy
from netmigrate.netmodel import Flexibility, NodeKind, SiteKind, Topology, build_topology, edit_document, node_equiv, \
    shortest_paths_from
from netmigrate.policy import PolicySet
from netmigrate.traversal import DEFAULT_HOP_LIMIT, Probe, Traversal, policy_probe, simulate, tunnel_crossings

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define extension strategies available per migrated host

PROXY: str = "proxy"
MIRROR: str = "mirror"
STRATEGIES: tuple = (PROXY, MIRROR)


# Define document editing helpers

def _document_node(document: dict, node_id: str) -> dict:
    for entry in document["nodes"]:
        if entry["id"] == node_id:
            return entry
    raise UnknownNodeError(node_id)


def _document_site(document: dict, site_id: str) -> dict:
    for entry in document["sites"]:
        if entry["id"] == site_id:
            return entry
    raise ContractError("unknown site " + repr(site_id))


def _require_remote_site(document: dict, site_id: str) -> dict:
    site: dict = _document_site(document, site_id)
    if site["kind"] != SiteKind.REMOTE_DC.value:
        raise ContractError("site " + site_id + " is not a remote data center")
    return site


def _add_node(document: dict, entry: dict):
    if any(existing["id"] == entry["id"] for existing in document["nodes"]):
        raise ContractError("node " + entry["id"] + " already exists")
    document["nodes"].append(entry)


def _host_route(address: str) -> str:
    return address + "/" + str(ipaddress.ip_address(address).max_prefixlen)


def _detach(document: dict, node_id: str):
    """
    Remove every link of a node and every forwarding entry or copy rule pointing at it.
    """
    document["links"] = [link for link in document["links"] if node_id not in link]
    document["forwarding"].pop(node_id, None)
    for state in document["forwarding"].values():
        if "fib" in state:
            state["fib"] = {address: hop for address, hop in state["fib"].items() if hop != node_id}
        if "routes" in state:
            state["routes"] = [route for route in state["routes"] if route[1] != node_id]
        for key in ("uplink", "gateway"):
            if state.get(key) == node_id:
                del state[key]
    for entry in document["nodes"]:
        if entry.get("middlebox"):
            entry["middlebox"]["rules"] = [rule for rule in entry["middlebox"]["rules"]
                                           if not (rule["action"] == "copy-to" and rule.get("target") == node_id)]


# Define extension actions

@dataclasses.dataclass(frozen=True)
class AddSwitch:
    """
    Provision a switch in a remote site.
    """
    switch: str
    site: str
    kind = "add-switch"

    def apply(self, document: dict):
        _require_remote_site(document, self.site)
        _add_node(document, {"id": self.switch, "kind": NodeKind.SWITCH.value, "site": self.site, "addresses": []})


@dataclasses.dataclass(frozen=True)
class Relocate:
    """
    Move an enterprise host into a remote site, detaching it from its links and from every forwarding entry naming
    it, and optionally attaching it to a node of the new site. Addresses are preserved.
    """
    host: str
    site: str
    attach: typing.Optional[str] = None
    kind = "relocate"

    def apply(self, document: dict):
        entry: dict = _document_node(document, self.host)
        if entry["kind"] != NodeKind.HOST.value:
            raise ContractError("cannot relocate " + self.host + ": not a host")
        if _document_site(document, entry["site"])["kind"] != SiteKind.ENTERPRISE.value:
            raise ContractError("cannot relocate " + self.host + ": not in the enterprise site")
        _require_remote_site(document, self.site)
        _detach(document, self.host)
        entry["site"] = self.site
        if self.attach is not None:
            _document_node(document, self.attach)
            document["links"].append([self.host, self.attach])


@dataclasses.dataclass(frozen=True)
class Mirror:
    """
    Replicate a middlebox (function class and full rule set) into a remote site, optionally linked to a node there.
    """
    middlebox: str
    site: str
    mirror: str
    attach: typing.Optional[str] = None
    kind = "mirror"

    def apply(self, document: dict):
        entry: dict = _document_node(document, self.middlebox)
        if entry["kind"] != NodeKind.MIDDLEBOX.value:
            raise ContractError("cannot mirror " + self.middlebox + ": not a middlebox")
        if any(rule["action"] == "copy-to" for rule in entry["middlebox"]["rules"]):
            raise ContractError("cannot mirror " + self.middlebox + ": copy rules are bound to local neighbors")
        site: dict = _require_remote_site(document, self.site)
        if site.get("flexibility", Flexibility.FULL.value) == Flexibility.RESTRICTED.value:
            raise ContractError("site " + self.site + " is restricted and accepts no middlebox")
        _add_node(document, {"id": self.mirror, "kind": NodeKind.MIDDLEBOX.value, "site": self.site, "addresses": [],
                             "middlebox": copy.deepcopy(entry["middlebox"])})
        if self.attach is not None:
            _document_node(document, self.attach)
            document["links"].append([self.mirror, self.attach])


@dataclasses.dataclass(frozen=True)
class Proxy:
    """
    Stand in for a relocated host at its original attachment: the proxy endpoint owns the host addresses in the
    enterprise and is bridged by an encrypted tunnel to a remote endpoint next to the host.
    """
    host: str
    attachment: str
    proxy: str
    remote: str
    kind = "proxy"

    def apply(self, document: dict):
        host: dict = _document_node(document, self.host)
        if host["kind"] != NodeKind.HOST.value or \
                _document_site(document, host["site"])["kind"] != SiteKind.REMOTE_DC.value:
            raise ContractError("cannot proxy " + self.host + ": not a relocated host")
        attachment: dict = _document_node(document, self.attachment)
        for entry in document["nodes"]:
            if entry["site"] == attachment["site"] and set(entry["addresses"]) & set(host["addresses"]):
                raise ContractError("address conflict at " + self.attachment + ": " + entry["id"] +
                                    " already owns an address of " + self.host)
        _add_node(document, {"id": self.proxy, "kind": NodeKind.TUNNEL_ENDPOINT.value, "site": attachment["site"],
                             "addresses": list(host["addresses"])})
        _add_node(document, {"id": self.remote, "kind": NodeKind.TUNNEL_ENDPOINT.value, "site": host["site"],
                             "addresses": []})
        document["links"].extend([[self.proxy, self.attachment], [self.proxy, self.remote], [self.remote, self.host]])
        document["tunnels"].append({"a": self.proxy, "b": self.remote, "encrypted": True})
        document["forwarding"].setdefault(self.host, {})["gateway"] = self.remote
        state: dict = document["forwarding"].setdefault(self.attachment, {})
        if attachment["kind"] == NodeKind.SWITCH.value:
            state.setdefault("fib", {}).update({address: self.proxy for address in host["addresses"]})
        else:
            state["routes"] = [[_host_route(address), self.proxy] for address in host["addresses"]] + \
                              state.get("routes", [])


@dataclasses.dataclass(frozen=True)
class Tunnel:
    """
    Create two tunnel endpoints, each linked to its attachment node, and the tunnel between them.
    """
    endpoint_a: str
    endpoint_b: str
    encrypted: bool = True
    attach_a: typing.Optional[str] = None
    attach_b: typing.Optional[str] = None
    kind = "tunnel"

    def apply(self, document: dict):
        for endpoint, attach in ((self.endpoint_a, self.attach_a), (self.endpoint_b, self.attach_b)):
            site: str = _document_node(document, attach)["site"] if attach is not None else \
                next(entry["id"] for entry in document["sites"] if entry["kind"] == SiteKind.ENTERPRISE.value)
            _add_node(document, {"id": endpoint, "kind": NodeKind.TUNNEL_ENDPOINT.value, "site": site, "addresses": []})
            if attach is not None:
                document["links"].append([endpoint, attach])
        document["links"].append([self.endpoint_a, self.endpoint_b])
        document["tunnels"].append({"a": self.endpoint_a, "b": self.endpoint_b, "encrypted": self.encrypted})


@dataclasses.dataclass(frozen=True)
class RouteFix:
    """
    Patch the forwarding state of a node: FIB entries are set, routes are added ahead of existing ones (replacing a
    route for the same prefix), uplink, flood and gateway are set when given.
    """
    node: str
    fib: tuple = ()
    routes: tuple = ()
    uplink: typing.Optional[str] = None
    flood: typing.Optional[bool] = None
    gateway: typing.Optional[str] = None
    kind = "route-fix"

    def apply(self, document: dict):
        _document_node(document, self.node)
        state: dict = document["forwarding"].setdefault(self.node, {})
        if self.fib:
            state.setdefault("fib", {}).update(dict(self.fib))
        if self.routes:
            prefixes: set = {prefix for prefix, _ in self.routes}
            state["routes"] = [list(route) for route in self.routes] + \
                              [route for route in state.get("routes", []) if route[0] not in prefixes]
        for key in ("uplink", "flood", "gateway"):
            if getattr(self, key) is not None:
                state[key] = getattr(self, key)

    def to_json(self) -> dict:
        entry: dict = {"action": self.kind, "node": self.node}
        if self.fib:
            entry["fib"] = {address: hop for address, hop in self.fib}
        if self.routes:
            entry["routes"] = [list(route) for route in self.routes]
        for key in ("uplink", "flood", "gateway"):
            if getattr(self, key) is not None:
                entry[key] = getattr(self, key)
        return entry


ACTION_TYPES: dict = {action.kind: action for action in (AddSwitch, Relocate, Mirror, Proxy, Tunnel, RouteFix)}


def action_to_json(action) -> dict:
    if isinstance(action, RouteFix):
        return action.to_json()
    entry: dict = {"action": action.kind}
    entry.update(dataclasses.asdict(action))
    return entry


def action_from_json(entry: dict):
    """
    Rebuild an extension action from its JSON form.

    :param entry: dict with key action naming the action kind and one key per action field
    :return: the action
    :raises ContractError: on unknown action kinds or fields
    """
    fields: dict = dict(entry)
    kind: str = fields.pop("action", None)
    if kind not in ACTION_TYPES:
        raise ContractError("unknown extension action " + repr(kind))
    if kind == RouteFix.kind:
        fields["fib"] = tuple(sorted(dict(fields.get("fib", {})).items()))
        fields["routes"] = tuple(tuple(route) for route in fields.get("routes", []))
    try:
        return ACTION_TYPES[kind](**fields)
    except TypeError as error:
        raise ContractError("invalid " + kind + " action: " + str(error)) from None


# Define cost classes

@dataclasses.dataclass(frozen=True)
class CostModel:
    """
    Weights of the cost components of an extension plan. Weights are non-negative and at least one is positive.
    """
    weight_mirror: float = 1.0
    weight_wan_crossing: float = 1.0
    weight_proxy: float = 1.0

    def __post_init__(self):
        weights: numpy.ndarray = self.weights
        if numpy.any(weights < 0) or not numpy.any(weights > 0):
            raise ContractError("cost weights must be non-negative with at least one positive, got " +
                                str(tuple(weights.tolist())))

    @property
    def weights(self) -> numpy.ndarray:
        return numpy.array([self.weight_mirror, self.weight_wan_crossing, self.weight_proxy], dtype=float)

    def evaluate(self, mirrored_boxes: int, wan_crossings: int, proxies: int) -> "Cost":
        total: float = float(numpy.dot(self.weights, numpy.array([mirrored_boxes, wan_crossings, proxies], dtype=float)))
        return Cost(mirrored_boxes, wan_crossings, proxies, total)


@dataclasses.dataclass(frozen=True)
class Cost:
    """
    Cost components of an extension plan: mirrored middleboxes, tunnel crossings summed over the policy probes and
    proxies, with their weighted total.
    """
    mirrored_boxes: int = 0
    wan_crossings: int = 0
    proxies: int = 0
    total: float = 0.0

    def __post_init__(self):
        if min(self.mirrored_boxes, self.wan_crossings, self.proxies) < 0:
            raise ContractError("cost components must be non-negative")

    def to_json(self) -> dict:
        return {"mirrored_boxes": self.mirrored_boxes, "wan_crossings": self.wan_crossings,
                "proxies": self.proxies, "total": self.total}

    @staticmethod
    def from_json(entry: dict) -> "Cost":
        return Cost(int(entry["mirrored_boxes"]), int(entry["wan_crossings"]), int(entry["proxies"]),
                    float(entry["total"]))


# Define plan class

@dataclasses.dataclass(frozen=True)
class ExtensionPlan:
    """
    An ordered list of extension actions together with the image of every migrated node (node_map), the tunnel
    endpoints each policy scope gains (scope_additions, by policy id) and the cost of the plan once evaluated.
    """
    actions: tuple = ()
    node_map: dict = dataclasses.field(default_factory=dict)
    scope_additions: dict = dataclasses.field(default_factory=dict)
    cost: typing.Optional[Cost] = None

    @property
    def mirrors(self) -> tuple:
        return tuple(action for action in self.actions if isinstance(action, Mirror))

    @property
    def proxies(self) -> tuple:
        return tuple(action for action in self.actions if isinstance(action, Proxy))

    def images(self, node_id: str) -> tuple:
        return tuple(self.node_map.get(node_id, ()))

    def actions_key(self) -> str:
        return json.dumps([action_to_json(action) for action in self.actions], sort_keys=True)

    def to_json(self) -> dict:
        return {
            "actions": [action_to_json(action) for action in self.actions],
            "node_map": {node_id: list(self.node_map[node_id]) for node_id in sorted(self.node_map)},
            "scope_additions": {policy_id: sorted(self.scope_additions[policy_id])
                                for policy_id in sorted(self.scope_additions)},
            "cost": self.cost.to_json() if self.cost is not None else None,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @staticmethod
    def from_json(document: dict) -> "ExtensionPlan":
        cost: typing.Optional[dict] = document.get("cost")
        return ExtensionPlan(tuple(action_from_json(entry) for entry in document.get("actions", [])),
                             {node_id: tuple(images) for node_id, images in document.get("node_map", {}).items()},
                             {policy_id: frozenset(nodes)
                              for policy_id, nodes in document.get("scope_additions", {}).items()},
                             Cost.from_json(cost) if cost is not None else None)


# Define plan application functions

def apply_plan(topology: Topology, plan: ExtensionPlan) -> Topology:
    """
    Replay the actions of a plan on a topology.

    :param topology: the original topology
    :param plan: the plan to apply
    :return: the extended topology
    :raises ContractError: when an action is applied outside its precondition
    :raises TopologyError: when the resulting network is structurally invalid
    """
    document: dict = edit_document(topology)
    for action in plan.actions:
        action.apply(document)
    return build_topology(document)


def with_site_flexibility(topology: Topology, site: str, flexibility: Flexibility) -> Topology:
    """
    The same topology with the flexibility of one site changed, e.g. to model a restricted data center.
    """
    document: dict = edit_document(topology)
    _document_site(document, site)["flexibility"] = flexibility.value
    return build_topology(document)


def _fresh_name(topology: Topology, base: str, taken: typing.AbstractSet = frozenset()) -> str:
    name: str = base
    while topology.has_node(name) or name in taken:
        name += "'"
    return name


def _tunnel_names(first: str, second: str) -> tuple:
    return "TE_" + first + "_" + second, "TE_" + second + "_" + first


# Define host attachment

@dataclasses.dataclass(frozen=True)
class HostAttachment:
    """
    Where a host hangs off the switch fabric: its nearest switch, the inline middleboxes between the switch and
    the host (switch side first) and the host's neighbor on that path.
    """
    host: str
    switch: str
    chain: tuple
    first_hop: str


def access_switch(topology: Topology, host: str) -> HostAttachment:
    """
    Find the access switch of a host: the switch with the fewest hops from it, ties broken by id.

    :param topology: the topology
    :param host: the host node id
    :return: the HostAttachment
    :raises ContractError: when the host reaches no switch
    """
    hops, previous = shortest_paths_from(topology, host)
    switches: list = sorted((hops[node_id], node_id) for node_id in topology.nodes_of_kind(NodeKind.SWITCH)
                            if node_id in hops)
    if not switches:
        raise ContractError("host " + host + " reaches no switch")
    switch: str = switches[0][1]
    path: list = [switch]
    while path[-1] != host:
        path.append(previous[path[-1]])
    return HostAttachment(host, switch, tuple(path[1:-1]), path[-2])


def mirror_chain(topology: Topology, host: str) -> typing.Optional[HostAttachment]:
    """
    The attachment of a host when every node between it and its access switch is an inline middlebox (exactly two
    neighbors), i.e. when the whole chain can be mirrored next to the relocated host; None otherwise.
    """
    attachment: HostAttachment = access_switch(topology, host)
    for node_id in attachment.chain:
        if topology.node(node_id).kind is not NodeKind.MIDDLEBOX or len(topology.neighbors(node_id)) != 2:
            return None
        if any(rule.action == "copy-to" for rule in topology.node(node_id).middlebox.rules):
            return None
    return attachment


def require_hosts(topology: Topology, hosts: typing.Iterable) -> list:
    hosts = sorted(set(hosts))
    for host in hosts:
        if topology.node(host).kind is not NodeKind.HOST:
            raise ContractError("cannot relocate " + host + ": not a host")
        if topology.site(topology.node(host).site).kind is not SiteKind.ENTERPRISE:
            raise ContractError("cannot relocate " + host + ": not in the enterprise site")
    return hosts


def _scope_additions(policy_set: typing.Optional[PolicySet], node_map: dict, tunnels: list) -> dict:
    """
    A tunnel enters the scope of a policy when both of its attachment nodes lie in the scope mapped through the plan.
    """
    additions: dict = {}
    if policy_set is None:
        return additions
    for policy in policy_set:
        mapped: set = _mapped_scope(policy.scope, node_map)
        endpoints: set = set()
        for endpoint_a, endpoint_b, attach_a, attach_b in tunnels:
            if attach_a in mapped and attach_b in mapped:
                endpoints.update((endpoint_a, endpoint_b))
        if endpoints:
            additions[policy.id] = frozenset(endpoints)
    return additions


def _mapped_scope(scope: typing.AbstractSet, node_map: typing.Mapping) -> set:
    mapped: set = set(scope)
    for node_id in scope:
        mapped.update(node_map.get(node_id, ()))
    return mapped


# Define plan builders

def naive_plan(topology: Topology, hosts: typing.Iterable, site: str,
               policy_set: typing.Optional[PolicySet] = None) -> ExtensionPlan:
    """
    The policy-unaware baseline: every host moves behind a single remote switch, which floods on FIB misses, and an
    encrypted layer-2 tunnel bridges the remote switch to each original access switch.

    :param topology: the original topology
    :param hosts: the hosts to relocate
    :param site: the remote site
    :param policy_set: optional policies, used only to compute the scope additions of the plan
    :return: the ExtensionPlan
    """
    hosts = require_hosts(topology, hosts)
    if not hosts:
        return ExtensionPlan()
    if topology.site(site).kind is not SiteKind.REMOTE_DC:
        raise ContractError("site " + site + " is not a remote data center")
    remote_switch: str = _fresh_name(topology, "RS1")
    actions: list = [AddSwitch(remote_switch, site)]
    node_map: dict = {}
    groups: dict = {}
    remote_fib: list = []
    for host in hosts:
        groups.setdefault(access_switch(topology, host).switch, []).append(host)
        actions.append(Relocate(host, site, remote_switch))
        node_map[host] = (host,)
        remote_fib.extend((address, host) for address in topology.node(host).addresses)
    tunnels: list = []
    for switch in sorted(groups):
        local, remote = _tunnel_names(switch, remote_switch)
        actions.append(Tunnel(local, remote, True, switch, remote_switch))
        actions.append(RouteFix(switch, fib=tuple((address, local) for host in groups[switch]
                                                  for address in topology.node(host).addresses)))
        node_map[switch] = (remote_switch,)
        tunnels.append((local, remote, switch, remote_switch))
    actions.append(RouteFix(remote_switch, fib=tuple(remote_fib)))
    return ExtensionPlan(tuple(actions), node_map, _scope_additions(policy_set, node_map, tunnels))


def relocate_naive(topology: Topology, hosts: typing.Iterable, site: str) -> Topology:
    """
    Relocate hosts into a remote site the naive way, with no regard for policies.

    :param topology: the original topology
    :param hosts: the enterprise hosts to relocate
    :param site: the remote data center site
    :return: the relocated topology (unchanged for no hosts)
    :raises ContractError: when a node is not an enterprise host or the site is not a remote data center
    """
    return apply_plan(topology, naive_plan(topology, hosts, site))


def build_plan(topology: Topology, policy_set: typing.Optional[PolicySet],
               site: str, strategies: typing.Mapping) -> ExtensionPlan:
    """
    Build the plan relocating each host with its own strategy.
    With the mirror strategy a host moves behind a remote switch standing for its access switch, preceded by mirrors
    of its inline middleboxes; the remote switch is bridged to the access switch by an encrypted tunnel. With the
    proxy strategy a host moves alone and a proxy at its original attachment hairpins its traffic through the
    original enterprise path before tunneling it to the host.

    :param topology: the original topology
    :param policy_set: optional policies, used to compute the scope additions of the plan
    :param site: the remote site
    :param strategies: mapping host -> PROXY or MIRROR
    :return: the ExtensionPlan (not yet costed)
    :raises ContractError: when a strategy is unknown or the mirror strategy does not apply to a host
    """
    require_hosts(topology, strategies.keys())
    actions: list = []
    node_map: dict = {}
    tunnels: list = []
    taken: set = set()
    groups: dict = {}
    for host in sorted(strategies):
        if strategies[host] not in STRATEGIES:
            raise ContractError("unknown strategy " + repr(strategies[host]) + " for " + host)
        if strategies[host] == MIRROR:
            attachment: typing.Optional[HostAttachment] = mirror_chain(topology, host)
            if attachment is None:
                raise ContractError("host " + host + " is not attached through inline middleboxes only")
            groups.setdefault(attachment.switch, []).append(attachment)
    for switch in sorted(groups):
        remote_switch: str = _fresh_name(topology, "RS_" + switch, taken)
        taken.add(remote_switch)
        actions.append(AddSwitch(remote_switch, site))
        node_map[switch] = (remote_switch,)
        remote_fib: list = []
        for attachment in groups[switch]:
            previous: str = remote_switch
            for box in attachment.chain:
                mirror: str = _fresh_name(topology, box + "'", taken)
                taken.add(mirror)
                actions.append(Mirror(box, site, mirror, previous))
                node_map[box] = (mirror,)
                previous = mirror
            actions.append(Relocate(attachment.host, site, previous))
            node_map[attachment.host] = (attachment.host,)
            first: str = node_map[attachment.chain[0]][0] if attachment.chain else attachment.host
            remote_fib.extend((address, first) for address in topology.node(attachment.host).addresses)
        local, remote = _tunnel_names(switch, remote_switch)
        actions.append(Tunnel(local, remote, True, switch, remote_switch))
        tunnels.append((local, remote, switch, remote_switch))
        actions.append(RouteFix(switch, fib=tuple((address, local) for attachment in groups[switch]
                                                  for address in topology.node(attachment.host).addresses)))
        actions.append(RouteFix(remote_switch, fib=tuple(remote_fib), uplink=remote))
    for host in sorted(host for host, strategy in strategies.items() if strategy == PROXY):
        attachment = access_switch(topology, host)
        proxy: str = _fresh_name(topology, "PX_" + host, taken)
        remote = _fresh_name(topology, "RX_" + host, taken)
        taken.update((proxy, remote))
        actions.append(Relocate(host, site, None))
        actions.append(Proxy(host, attachment.first_hop, proxy, remote))
        node_map[host] = (host,)
        tunnels.append((proxy, remote, attachment.first_hop, host))
    return ExtensionPlan(tuple(actions), node_map, _scope_additions(policy_set, node_map, tunnels))


# Define primitives

def apply_mirror(topology: Topology, middlebox: str, site: str) -> tuple:
    """
    Mirror a middlebox into a remote site. The mirror carries the same function class and rules as the original and
    is linked only to the first switch of the site, if any; the original is untouched.

    :param topology: the topology
    :param middlebox: the middlebox to mirror
    :param site: the remote data center site
    :return: (extended Topology, id of the mirror)
    :raises ContractError: when the node is not a middlebox or the site rejects middleboxes
    """
    mirror: str = _fresh_name(topology, middlebox + "'")
    switches: list = sorted(node.id for node in topology.nodes if node.site == site and node.kind is NodeKind.SWITCH)
    document: dict = edit_document(topology)
    Mirror(middlebox, site, mirror, switches[0] if switches else None).apply(document)
    logger.info("mirrored %s into %s as %s", middlebox, site, mirror)
    return build_topology(document), mirror


def apply_proxy(topology: Topology, relocated: str, original_attachment: str) -> Topology:
    """
    Place a proxy for a relocated host at its original attachment: the proxy answers for the host addresses in the
    enterprise and an encrypted tunnel carries the traffic to and from the host.

    :param topology: the topology, with the host already in a remote data center
    :param relocated: the relocated host
    :param original_attachment: the enterprise node the host was attached to
    :return: the extended topology
    :raises ContractError: when the host was never relocated or its address is already owned at the attachment
    """
    proxy: str = _fresh_name(topology, "PX_" + relocated)
    remote: str = _fresh_name(topology, "RX_" + relocated, {proxy})
    document: dict = edit_document(topology)
    Proxy(relocated, original_attachment, proxy, remote).apply(document)
    logger.info("proxied %s at %s through %s <-> %s", relocated, original_attachment, proxy, remote)
    return build_topology(document)


# Define policy mapping functions

def map_policy_set(policy_set: PolicySet, plan: ExtensionPlan) -> PolicySet:
    """
    The policies of the extended network: every scope gains the images of its members and the tunnel endpoints
    the plan adds for the policy. Classes, destinations and waypoints are unchanged.
    """
    policies: list = []
    for policy in policy_set:
        scope: set = _mapped_scope(policy.scope, plan.node_map)
        scope.update(plan.scope_additions.get(policy.id, ()))
        policies.append(dataclasses.replace(policy, scope=frozenset(scope)))
    return PolicySet(policies)


def plan_equivalents(topology: Topology, extended: Topology, plan: ExtensionPlan) -> dict:
    """
    Map every original middlebox to its images in the extended network that are equivalent to it, so that a
    mirror satisfies the waypoint constraints of its original.
    """
    equivalents: dict = {}
    for node_id, images in plan.node_map.items():
        if not topology.has_node(node_id) or topology.node(node_id).kind is not NodeKind.MIDDLEBOX:
            continue
        accepted: tuple = tuple(image for image in images
                                if extended.has_node(image) and extended.node(image).kind is NodeKind.MIDDLEBOX
                                and node_equiv(topology.node(node_id), extended.node(image)))
        if accepted:
            equivalents[node_id] = accepted
    return equivalents


# Define verification functions

@dataclasses.dataclass(frozen=True)
class HomomorphismVerdict:
    """
    Outcome of a policy homomorphism verification: it holds when every policy is delivered, meets its waypoints
    (mirrors counting as their originals) and stays within its mapped scope.
    """
    report: ViolationReport

    @property
    def holds(self) -> bool:
        return self.report.total == 0 and not self.report.configuration_errors

    @property
    def failures(self) -> tuple:
        return self.report.violations

    @property
    def failing_policies(self) -> list:
        return sorted(self.report.per_policy_counts)

    def to_json(self) -> dict:
        document: dict = {"holds": self.holds}
        document.update(self.report.to_json())
        return document


def verify_homomorphism(topology: Topology, extended: Topology,
                        policy_set: PolicySet, plan: ExtensionPlan,
                        hop_limit: int = DEFAULT_HOP_LIMIT) -> HomomorphismVerdict:
    """
    Verify that an extended network still enforces every policy of the original one.

    :param topology: the original topology
    :param extended: the topology resulting from the plan
    :param policy_set: the original policies
    :param plan: the plan that produced the extended topology
    :param hop_limit: the simulation hop limit
    :return: the HomomorphismVerdict, carrying the failures as a ViolationReport
    """
    mapped: PolicySet = map_policy_set(policy_set, plan)
    equivalents: dict = plan_equivalents(topology, extended, plan)
    violations: list = []
    errors: list = []
    for policy in mapped:
        try:
            violations.extend(check_policy(extended, mapped, policy, equivalents, hop_limit))
        except (AmbiguousMatchError, ContractError) as error:
            errors.append("policy " + policy.id + ": " + str(error))
    verdict: HomomorphismVerdict = HomomorphismVerdict(ViolationReport(violations, errors))
    logger.debug("homomorphism %s for %d actions", "holds" if verdict.holds else "fails", len(plan.actions))
    return verdict


def plan_cost(extended: Topology, policy_set: PolicySet, plan: ExtensionPlan,
              cost_model: CostModel,
              hop_limit: int = DEFAULT_HOP_LIMIT) -> Cost:
    """
    Cost a plan on the network it produced: mirrors and proxies are counted from the actions, tunnel crossings
    are summed over the traversals of the policy probes.

    :param extended: the extended topology
    :param policy_set: the mapped policies
    :param plan: the plan
    :param cost_model: the weights
    :param hop_limit: the simulation hop limit
    :return: the Cost
    """
    crossings: int = 0
    for policy in policy_set:
        probe: Probe = policy_probe(policy, extended)
        traversal: Traversal = simulate(extended, probe.inject_at, probe.header, hop_limit)
        crossings += tunnel_crossings(extended, traversal.sigma)
    return cost_model.evaluate(len(plan.mirrors), crossings, len(plan.proxies))
