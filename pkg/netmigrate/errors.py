#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Define error classes


class NetMigrateError(Exception):
    """
    Root of every error raised by the package.
    """


class TopologyError(NetMigrateError):
    """
    Raised when a topology document cannot be turned into a valid Topology.

    Attributes:
        - issues: the full list of structural issues found, as human readable strings
    """

    def __init__(self, issues: list):
        self.issues: list = list(issues)
        super(TopologyError, self).__init__("; ".join(self.issues) if self.issues else "invalid topology")


class ParseIssue:
    """
    A single policy DSL error with its position in the source text (1-based line and column).
    """

    def __init__(self, line: int, column: int, message: str):
        self.line: int = line
        self.column: int = column
        self.message: str = message

    def __str__(self) -> str:
        return str(self.line) + ":" + str(self.column) + ": " + self.message

    def __repr__(self) -> str:
        return "ParseIssue(" + str(self) + ")"


class PolicyParseError(NetMigrateError):
    """
    Raised when a policy document does not parse or violates a policy invariant.

    Attributes:
        - issues: list of ParseIssue
    """

    def __init__(self, issues: list):
        self.issues: list = list(issues)
        super(PolicyParseError, self).__init__("\n".join(str(issue) for issue in self.issues))


class AmbiguousMatchError(NetMigrateError):
    """
    Raised when two policies of equal specificity match the same packet.
    """

    def __init__(self, first_id: str, second_id: str):
        self.policy_ids: tuple = (first_id, second_id)
        super(AmbiguousMatchError, self).__init__("ambiguous match between policies " + first_id + " and " + second_id)


class ContractError(NetMigrateError):
    """
    Raised when an operation is called outside its precondition.
    """


class UnknownNodeError(ContractError):
    """
    Raised when a node id does not resolve in the topology in hand.
    """

    def __init__(self, node_id: str):
        self.node_id: str = node_id
        super(UnknownNodeError, self).__init__("unknown node " + repr(node_id))


class InfeasibleError(NetMigrateError):
    """
    Raised by the planner when no candidate plan preserves every policy.

    Attributes:
        - policy_ids: the ids of the policies blocking every candidate
    """

    def __init__(self, policy_ids: list, reason: str = ""):
        self.policy_ids: list = sorted(set(policy_ids))
        message: str = "no policy preserving extension exists, blocked by " + ", ".join(self.policy_ids)
        if reason:
            message += " (" + reason + ")"
        super(InfeasibleError, self).__init__(message)


class ScenarioError(NetMigrateError):
    """
    Raised on invalid scenario parameters or when campus generation cannot reach a conformant network.
    """
