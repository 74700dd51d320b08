#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import required src

from netmigrate.check import Category, Check, CheckContext, Result, Violation
from netmigrate.checks.check_delivery import segment_delivered
from netmigrate.policy import WaypointVerdict, check_waypoints

# Define failure kind to category mapping

_CATEGORY_OF_KIND: dict = {
    "missed": Category.MISSED_WAYPOINT,
    "occurrence": Category.OCCURRENCE_VIOLATION,
    "order": Category.ORDER_VIOLATION,
}


class WaypointCheck(Check):
    """
    Waypoint check: the walk of a delivered packet must visit the policy waypoints in the required order and the
    required number of times. Mirrors of a middlebox, given as equivalents, count as the middlebox itself.
    Only delivered segments are eligible: an undelivered packet already fails the delivery check.
    """

    def __init__(self):
        super(WaypointCheck, self).__init__("waypoints")

    def _execute(self,
                 context: CheckContext) -> Result:
        verdict: WaypointVerdict = check_waypoints(context.policy.waypoint_spec, context.segment.sigma,
                                                   context.equivalents)
        violations: list = [Violation(context.policy.id, _CATEGORY_OF_KIND[failure.kind], failure.nodes,
                                      failure.message, context.traversal) for failure in verdict.failures]
        return Result(self.name, violations)

    def is_eligible(self,
                    context: CheckContext) -> bool:
        if context.policy is None or context.segment is None:
            return False
        return segment_delivered(context)
