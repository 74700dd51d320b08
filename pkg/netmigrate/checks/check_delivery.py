#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import required src

from netmigrate.check import Category, Check, CheckContext, Result, Violation


def segment_delivered(context: CheckContext) -> bool:
    """
    Whether the segment under check carried the packet to the destination of its governing policy: the segment must
    end at the destination and, unless a later rewrite hands the packet on, the traversal must end in delivery.

    :param context: the CheckContext of a policy segment
    :return: True if the packet reached the policy destination
    """
    segment = context.segment
    outcome = context.traversal.outcome
    if segment.last and not outcome.delivered:
        return False
    destination = context.policy.destination
    if destination is None:
        return True
    return bool(segment.sigma) and segment.sigma[-1] == destination


class DeliveryCheck(Check):
    """
    Delivery check: the packet of a policy must be delivered to the policy destination. A packet dropped on the
    way, looping until the hop limit or delivered elsewhere fails the check.
    """

    def __init__(self):
        super(DeliveryCheck, self).__init__("delivery")

    def _execute(self,
                 context: CheckContext) -> Result:
        if segment_delivered(context):
            return Result(self.name)
        segment = context.segment
        outcome = context.traversal.outcome
        end: str = segment.sigma[-1] if segment.sigma else context.traversal.inject_at
        if segment.last and not outcome.delivered:
            message: str = "expected delivery to " + str(context.policy.destination) + ", got " + str(outcome)
        else:
            message = "delivered to " + end + " instead of " + str(context.policy.destination)
        return Result(self.name, [Violation(context.policy.id, Category.DELIVERY_FAILURE, (end,), message,
                                            context.traversal)])

    def is_eligible(self,
                    context: CheckContext) -> bool:
        return context.policy is not None and context.segment is not None
