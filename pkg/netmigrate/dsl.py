#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import logging
import re
import typing

# Import required src

from netmigrate.errors import ContractError, ParseIssue, PolicyParseError
from netmigrate.netmodel import Topology
from netmigrate.policy import (OccurrenceConstraint, PacketClass, Policy, PolicySet, Relation, WaypointSpec,
                               find_precedence_cycle)

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define lexical constants

DEFAULT_BANNER: str = "# default: deny (packets matching no policy must be filtered)"

_TOKEN_PATTERN: typing.Pattern = re.compile(r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<address>[0-9A-Fa-f]*:[0-9A-Fa-f]*:[0-9A-Fa-f:.]*(?:/[0-9]+)?)
  | (?P<symbol>->|==|>=|<=|[>=\[\]{},:])
  | (?P<word>[A-Za-z0-9_.'@/*]+(?:-(?!>)[A-Za-z0-9_.'@/*]+)*)
""", re.VERBOSE)

_KEYWORDS: tuple = ("policy", "from", "to", "scope", "waypoints", "occur")


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind: str, text: str, line: int, column: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column

    def __repr__(self) -> str:
        return self.kind + ":" + repr(self.text) + "@" + str(self.line) + ":" + str(self.column)


class _Syntax(Exception):
    def __init__(self, token: _Token, message: str):
        super(_Syntax, self).__init__(message)
        self.issue: ParseIssue = ParseIssue(token.line, token.column, message)


def _tokenize(text: str, issues: list) -> list:
    tokens: list = []
    line: int = 1
    line_start: int = 0
    position: int = 0
    while position < len(text):
        found = _TOKEN_PATTERN.match(text, position)
        column: int = position - line_start + 1
        if found is None:
            issues.append(ParseIssue(line, column, "unexpected character " + repr(text[position])))
            position += 1
            continue
        kind: str = found.lastgroup
        if kind == "newline":
            line += 1
            line_start = found.end()
        elif kind in ("symbol", "word"):
            tokens.append(_Token(kind, found.group(), line, column))
        elif kind == "address":
            # IPv6 literals read as words; their colons never start a symbol
            tokens.append(_Token("word", found.group(), line, column))
        position = found.end()
    tokens.append(_Token("end", "", line, position - line_start + 1))
    return tokens


class _Parser:
    """
    Recursive descent parser over the policy token stream. Each policy is parsed independently so that one
    malformed policy does not hide the errors of the following ones.
    """

    def __init__(self, tokens: list, topology: typing.Optional[Topology]):
        self._tokens: list = tokens
        self._position: int = 0
        self._topology: typing.Optional[Topology] = topology
        self._seen: set = set()
        self.issues: list = []

    # Token helpers

    def _peek(self) -> _Token:
        return self._tokens[self._position]

    def _next(self) -> _Token:
        token: _Token = self._tokens[self._position]
        if token.kind != "end":
            self._position += 1
        return token

    def _expect(self, text: str) -> _Token:
        token: _Token = self._next()
        if token.text != text or token.kind == "end":
            raise _Syntax(token, "expected " + repr(text) + ", found " + (repr(token.text) if token.kind != "end" else "end of input"))
        return token

    def _word(self, what: str) -> _Token:
        token: _Token = self._next()
        if token.kind != "word":
            raise _Syntax(token, "expected " + what + ", found " + (repr(token.text) if token.kind != "end" else "end of input"))
        return token

    def _accept(self, text: str) -> bool:
        if self._peek().kind != "end" and self._peek().text == text:
            self._next()
            return True
        return False

    def _recover(self):
        while self._peek().kind != "end" and not (self._peek().kind == "word" and self._peek().text == "policy"):
            self._next()

    # Grammar

    def parse(self) -> list:
        policies: list = []
        while self._peek().kind != "end":
            try:
                policy: typing.Optional[Policy] = self._policy()
            except _Syntax as error:
                self.issues.append(error.issue)
                self._recover()
                continue
            if policy is not None:
                policies.append(policy)
        return policies

    def _policy(self) -> typing.Optional[Policy]:
        start: _Token = self._word("'policy'")
        if start.text != "policy":
            raise _Syntax(start, "expected 'policy', found " + repr(start.text))
        identifier: _Token = self._word("policy id")
        self._expect(":")
        fields: list = self._header()
        origin: typing.Optional[_Token] = None
        destination: typing.Optional[_Token] = None
        if self._accept("from"):
            origin = self._word("origin node")
        if self._accept("to"):
            destination = self._word("destination node")
        self._expect("scope")
        scope: list = self._node_list("{", "}")
        chains: list = []
        if self._accept("waypoints"):
            self._expect("[")
            if not self._accept("]"):
                while True:
                    chain: list = [self._word("waypoint node")]
                    while self._accept("->"):
                        chain.append(self._word("waypoint node"))
                    chains.append(chain)
                    if self._accept("]"):
                        break
                    self._expect(",")
        occurrences: list = []
        if self._accept("occur"):
            self._expect("{")
            if not self._accept("}"):
                while True:
                    occurrences.append(self._occurrence())
                    if self._accept("}"):
                        break
                    self._expect(",")
        return self._build(start, identifier, fields, origin, destination, scope, chains, occurrences)

    def _header(self) -> list:
        self._expect("[")
        fields: list = []
        for position in range(5):
            fields.append(self._word("header field"))
            if position < 4:
                self._expect(",")
        self._expect("]")
        return fields

    def _node_list(self, opening: str, closing: str) -> list:
        self._expect(opening)
        nodes: list = []
        if self._accept(closing):
            return nodes
        while True:
            nodes.append(self._word("node"))
            if self._accept(closing):
                return nodes
            self._expect(",")

    def _occurrence(self) -> tuple:
        node: _Token = self._word("occurrence node")
        relation: _Token = self._next()
        if relation.text not in ("==", "=", ">=", "<=", ">") or relation.kind != "symbol":
            raise _Syntax(relation, "expected a relation (==, >=, <=, >), found " + repr(relation.text))
        count: _Token = self._word("occurrence count")
        if not count.text.isdigit():
            raise _Syntax(count, "occurrence count must be a non-negative integer, found " + repr(count.text))
        return node, relation, int(count.text)

    # Semantic checks

    def _issue(self, token: _Token, message: str):
        self.issues.append(ParseIssue(token.line, token.column, message))

    def _node(self, token: _Token) -> bool:
        if self._topology is not None and not self._topology.has_node(token.text):
            self._issue(token, "unknown node " + repr(token.text))
            return False
        return True

    def _address(self, token: _Token) -> typing.Optional[str]:
        if token.text == "*":
            return None
        if self._topology is None or "/" in token.text:
            return token.text
        address: typing.Optional[str] = self._topology.resolve_address(token.text)
        if address is None:
            self._issue(token, "unknown node or address " + repr(token.text))
            return token.text
        return address

    def _port(self, token: _Token) -> typing.Optional[int]:
        if token.text == "*":
            return None
        if not token.text.isdigit() or int(token.text) > 65535:
            self._issue(token, "invalid port " + repr(token.text))
            return None
        return int(token.text)

    def _build(self, start, identifier, fields, origin, destination, scope, chains, occurrences) -> typing.Optional[Policy]:
        before: int = len(self.issues)
        if identifier.text in self._seen:
            self._issue(identifier, "duplicate policy id " + identifier.text)
        self._seen.add(identifier.text)
        src, dst = self._address(fields[0]), self._address(fields[1])
        sport, dport = self._port(fields[2]), self._port(fields[3])
        proto: typing.Optional[str] = None if fields[4].text == "*" else fields[4].text.upper()
        if origin is not None:
            self._node(origin)
        scope_nodes: list = [token.text for token in scope if self._node(token)]
        if not scope:
            self._issue(start, "policy " + identifier.text + " has an empty scope")
        waypoints: list = []
        precedence: set = set()
        for chain in chains:
            for token in chain:
                self._node(token)
                if token.text not in waypoints:
                    waypoints.append(token.text)
                if token.text not in {node.text for node in scope}:
                    self._issue(token, "waypoint " + token.text + " is outside the scope of " + identifier.text)
            for first, second in zip(chain, chain[1:]):
                precedence.add((first.text, second.text))
        cycle: typing.Optional[list] = find_precedence_cycle(precedence)
        if cycle is not None:
            self._issue(chains[0][0], "cyclic precedence: " + " -> ".join(cycle))
        constraints: list = []
        for node, relation, count in occurrences:
            if node.text not in waypoints:
                self._issue(node, "occurrence on non-waypoint node " + node.text)
                continue
            if relation.text == ">":
                constraints.append(OccurrenceConstraint(node.text, Relation.GE, count + 1))
            elif relation.text == ">=" and count == 0:
                self._issue(relation, "vacuous occurrence constraint " + node.text + " >= 0")
            else:
                constraints.append(OccurrenceConstraint(node.text, Relation("==" if relation.text == "=" else relation.text), count))
        if destination is not None:
            self._node(destination)
            target: typing.Optional[str] = destination.text
        else:
            target = default_destination(dst, self._topology)
        if target is not None and scope and self._topology is not None and target not in scope_nodes:
            self._issue(start, "destination " + target + " of " + identifier.text + " is outside its scope")
        if len(self.issues) > before:
            return None
        try:
            return Policy(identifier.text,
                          PacketClass(src, dst, sport, dport, proto, origin.text if origin is not None else None),
                          target, WaypointSpec(tuple(waypoints), frozenset(precedence), tuple(constraints)),
                          frozenset(scope_nodes))
        except ContractError as error:
            self._issue(start, str(error))
            return None


def default_destination(dst: typing.Optional[str], topology: typing.Optional[Topology]) -> typing.Optional[str]:
    """
    The destination implied by a class destination address: the node terminating it when a topology is known,
    the address itself otherwise.
    """
    if dst is None:
        return None
    if topology is None:
        return dst
    return topology.node_for(dst) or dst


# Define DSL functions

def parse_policy_set(text: str,
                     topology: typing.Optional[Topology] = None) -> PolicySet:
    """
    Parse a policy document. Header tokens may be node ids, alias names or literal addresses; when a topology is
    given they are resolved to addresses and every node token is checked against it.

    :param text: the policy document (UTF-8 text, # comments)
    :param topology: optional topology used to resolve and check tokens
    :return: the PolicySet
    :raises PolicyParseError: carrying every issue found, each with line and column
    """
    issues: list = []
    tokens: list = _tokenize(text, issues)
    parser: _Parser = _Parser(tokens, topology)
    policies: list = parser.parse()
    issues.extend(parser.issues)
    if issues:
        issues.sort(key=lambda issue: (issue.line, issue.column))
        raise PolicyParseError(issues)
    logger.debug("parsed %d policies", len(policies))
    return PolicySet(policies)


def _name(value: typing.Optional[str], topology: typing.Optional[Topology]) -> str:
    if value is None:
        return "*"
    if topology is None or "/" in value:
        return value
    return topology.name_of(value)


def _render_waypoints(spec: WaypointSpec) -> str:
    order: dict = {node: index for index, node in enumerate(spec.waypoints)}
    pairs: list = sorted(spec.precedence, key=lambda pair: (order[pair[0]], order[pair[1]]))
    chains: list = []
    for first, second in pairs:
        for chain in chains:
            if chain[-1] == first and second not in chain:
                chain.append(second)
                break
        else:
            chains.append([first, second])
    chained: set = {node for chain in chains for node in chain}
    items: list = [" -> ".join(chain) for chain in chains] + [node for node in spec.waypoints if node not in chained]
    appearance: list = []
    for item in items:
        for node in item.split(" -> "):
            if node not in appearance:
                appearance.append(node)
    if appearance != list(spec.waypoints):
        items = list(spec.waypoints) + [first + " -> " + second for first, second in pairs]
    return "[" + ", ".join(items) + "]"


def render_policy_set(policy_set: PolicySet,
                      topology: typing.Optional[Topology] = None) -> str:
    """
    Render a policy set as canonical DSL text (scope tokens sorted). Parsing the result with the same topology
    gives back an equal policy set.

    :param policy_set: the policies
    :param topology: optional topology used to print symbolic names instead of addresses
    :return: the policy document
    """
    lines: list = [DEFAULT_BANNER]
    for policy in policy_set:
        packet_class: PacketClass = policy.packet_class
        header: str = ", ".join([_name(packet_class.src, topology), _name(packet_class.dst, topology),
                                 "*" if packet_class.sport is None else str(packet_class.sport),
                                 "*" if packet_class.dport is None else str(packet_class.dport),
                                 packet_class.proto or "*"])
        text: str = "policy " + policy.id + ": [" + header + "]"
        if packet_class.origin_constraint is not None:
            text += " from " + packet_class.origin_constraint
        if policy.destination != default_destination(packet_class.dst, topology):
            text += " to " + policy.destination
        text += " scope {" + ", ".join(sorted(policy.scope)) + "}"
        spec: WaypointSpec = policy.waypoint_spec
        text += " waypoints " + _render_waypoints(spec)
        text += " occur {" + ", ".join(str(constraint) for constraint in spec.occurrence) + "}"
        lines.append(text)
    return "\n".join(lines) + "\n"
