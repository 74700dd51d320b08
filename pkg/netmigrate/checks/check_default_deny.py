#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import required src

from netmigrate.check import DEFAULT_DENY_ID, Category, Check, CheckContext, Result, Violation


class DefaultDenyCheck(Check):
    """
    Default-deny check: a packet governed by no policy must be filtered before it reaches any host.
    """

    def __init__(self):
        super(DefaultDenyCheck, self).__init__("default_deny")

    def _execute(self,
                 context: CheckContext) -> Result:
        traversal = context.traversal
        if not traversal.outcome.delivered:
            return Result(self.name)
        source: str = traversal.inject_at
        target: str = traversal.outcome.node
        return Result(self.name, [Violation(DEFAULT_DENY_ID, Category.DEFAULT_DENY_BREACH, (source, target),
                                            "unpermitted packet " + str(traversal.header) + " delivered from " +
                                            source + " to " + target, traversal)])

    def is_eligible(self,
                    context: CheckContext) -> bool:
        return context.policy is None
