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
import json
import time
import typing

# Import required src

from netmigrate.netmodel import Topology
from netmigrate.policy import Policy, PolicySet
from netmigrate.traversal import Segment, Traversal

# Define the id under which default-deny violations are reported

DEFAULT_DENY_ID: str = "DefaultDeny"


# Define violation categories, in report order

class Category(enum.Enum):
    MISSED_WAYPOINT = "MissedWaypoint"
    ORDER_VIOLATION = "OrderViolation"
    OCCURRENCE_VIOLATION = "OccurrenceViolation"
    SCOPE_LEAK = "ScopeLeak"
    DEFAULT_DENY_BREACH = "DefaultDenyBreach"
    DELIVERY_FAILURE = "DeliveryFailure"


CATEGORY_ORDER: dict = {category: position for position, category in enumerate(Category)}


@dataclasses.dataclass(frozen=True)
class Violation:
    """
    A single conformance failure: which policy (or the default deny), what kind, the offending nodes and the
    traversal witnessing it.
    """
    policy_id: str
    category: Category
    detail: tuple
    message: str
    witness: Traversal = dataclasses.field(compare=False, repr=False)

    @property
    def key(self) -> tuple:
        return self.policy_id, CATEGORY_ORDER[self.category], self.detail

    def to_json(self) -> dict:
        return {
            "policy": self.policy_id,
            "category": self.category.value,
            "detail": list(self.detail),
            "message": self.message,
            "outcome": str(self.witness.outcome),
            "sigma": list(self.witness.sigma),
        }


class ViolationReport:
    """
    Categorized violations of a policy set over a topology, in deterministic order, plus the configuration errors
    (e.g. ambiguous policy matches) met while checking.
    """

    def __init__(self,
                 violations: typing.Iterable, configuration_errors: typing.Iterable = ()):
        unique: dict = {}
        for violation in violations:
            unique.setdefault(violation.key, violation)
        self._violations: tuple = tuple(unique[key] for key in sorted(unique))
        self._configuration_errors: tuple = tuple(configuration_errors)

    @property
    def violations(self) -> tuple:
        return self._violations

    @property
    def configuration_errors(self) -> tuple:
        return self._configuration_errors

    @property
    def total(self) -> int:
        return len(self._violations)

    @property
    def per_policy_counts(self) -> dict:
        counts: dict = {}
        for violation in self._violations:
            counts[violation.policy_id] = counts.get(violation.policy_id, 0) + 1
        return counts

    @property
    def per_category_counts(self) -> dict:
        counts: dict = {category.value: 0 for category in Category}
        for violation in self._violations:
            counts[violation.category.value] += 1
        return counts

    def of_policy(self, policy_id: str) -> list:
        return [violation for violation in self._violations if violation.policy_id == policy_id]

    def to_json(self) -> dict:
        return {
            "violations": [violation.to_json() for violation in self._violations],
            "totals": {"total": self.total, "per_policy": self.per_policy_counts,
                       "per_category": self.per_category_counts},
            "configuration_errors": list(self._configuration_errors),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def to_text(self) -> str:
        lines: list = []
        if not self._violations:
            lines.append("no policy violations")
        else:
            width: int = max(len(violation.policy_id) for violation in self._violations)
            for violation in self._violations:
                lines.append(violation.policy_id.ljust(width) + "  " + violation.category.value.ljust(20) + "  " + violation.message)
        for error in self._configuration_errors:
            lines.append("configuration error: " + error)
        lines.append("total: " + str(self.total))
        return "\n".join(lines) + "\n"


# Define comparison class

class Comparison:
    """
    Per-category counts of two reports side by side, with signed deltas (second minus first).
    """

    def __init__(self,
                 first: ViolationReport, second: ViolationReport,
                 labels: tuple = ("naive", "planner")):
        self.labels: tuple = labels
        first_counts: dict = first.per_category_counts
        second_counts: dict = second.per_category_counts
        self.rows: list = [(category.value, first_counts[category.value], second_counts[category.value],
                            second_counts[category.value] - first_counts[category.value]) for category in Category]
        self.rows.append(("total", first.total, second.total, second.total - first.total))

    def delta(self, name: str = "total") -> int:
        return next(row[3] for row in self.rows if row[0] == name)

    def to_text(self) -> str:
        header: tuple = ("category", self.labels[0], self.labels[1], "delta")
        lines: list = ["{:<20} {:>8} {:>8} {:>8}".format(*header)]
        for name, first, second, delta in self.rows:
            lines.append("{:<20} {:>8} {:>8} {:>+8}".format(name, first, second, delta))
        return "\n".join(lines) + "\n"


# Define check context and result classes

@dataclasses.dataclass(frozen=True)
class CheckContext:
    """
    Everything a check needs: the network, the policies, the policy governing the segment under check (None for
    default-deny probes), the segment itself and the whole traversal.
    """
    topology: Topology
    policy_set: PolicySet
    policy: typing.Optional[Policy]
    segment: typing.Optional[Segment]
    traversal: Traversal
    equivalents: typing.Optional[typing.Mapping] = None


class Result:
    """
    Wrapper class for check results.

    Attributes:
        - name: the name of the check giving the result
        - passed: whether or not the check in hand was passed
        - violations: the violations found, empty when passed
    """

    def __init__(self,
                 check_name: str,
                 violations: typing.Iterable = ()):
        self._check_name: str = check_name
        self._violations: tuple = tuple(violations)

    @property
    def name(self) -> str:
        return self._check_name

    @property
    def passed(self) -> bool:
        return not self._violations

    @property
    def violations(self) -> tuple:
        return self._violations


# Define base abstract check class

class Check:
    """
    Base check class to represent every conformance check run on a simulated packet.
    When run, the check returns its violations wrapped in a Result object.

    Attributes:
        - name: the name of the check, used in logs and battery keys
    """

    def __init__(self,
                 name: str):
        self.name: str = name

    def _execute(self,
                 context: CheckContext) -> Result:
        """
        Execute the check returning a Result object upon completion.

        :param context: the CheckContext of the segment or probe under check
        :return: a Result object stating the outcome of the check
        """
        # Abstract method, definition should be implemented on a child class basis
        raise NotImplementedError()

    def run(self,
            context: CheckContext) -> tuple:
        """
        Run the check on the given context, returning a Result object and the elapsed time upon completion.

        :param context: the CheckContext of the segment or probe under check
        :return: a Result object stating the outcome of the check and the elapsed time in milliseconds
        """
        start_time: float = time.perf_counter()
        result: Result = self._execute(context)
        end_time: float = time.perf_counter()
        return result, (end_time - start_time) * 1000.0

    def is_eligible(self,
                    context: CheckContext) -> bool:
        """
        Check whether or not the given context is eligible for the check.

        :param context: the CheckContext of the segment or probe under check
        :return: a boolean flag stating the eligibility or not of the check
        """
        # Abstract method, definition should be implemented on a child class basis
        raise NotImplementedError()
