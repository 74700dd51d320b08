#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import required src

from netmigrate.check import Category, Check, CheckContext, Result, Violation
from netmigrate.policy import ScopeVerdict, check_scope


class ScopeCheck(Check):
    """
    Scope check: no copy of the packet (flooded, mirrored or sniffed) may reach a node outside the policy scope.
    """

    def __init__(self):
        super(ScopeCheck, self).__init__("scope")

    def _execute(self,
                 context: CheckContext) -> Result:
        verdict: ScopeVerdict = check_scope(context.policy.scope, context.segment.reach)
        if verdict.contained:
            return Result(self.name)
        leaks: tuple = tuple(sorted(verdict.leaks))
        return Result(self.name, [Violation(context.policy.id, Category.SCOPE_LEAK, leaks,
                                            "packet reached nodes outside scope: " + ", ".join(leaks),
                                            context.traversal)])

    def is_eligible(self,
                    context: CheckContext) -> bool:
        return context.policy is not None and context.segment is not None
