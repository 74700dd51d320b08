#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import logging
import typing

# Import required src

from netmigrate.check import Check, CheckContext, Comparison, ViolationReport
from netmigrate.checks import DefaultDenyCheck, DeliveryCheck, ScopeCheck, WaypointCheck
from netmigrate.errors import AmbiguousMatchError, ContractError
from netmigrate.netmodel import Topology
from netmigrate.policy import DEFAULT_DENY, Policy, PolicySet, match_packet
from netmigrate.traversal import DEFAULT_HOP_LIMIT, DENY_PROBE_PORTS, Probe, Segment, Traversal, \
    classify_deny_headers, policy_probe, simulate

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define default check batteries: one for the segments of policy probes, one for default-deny probes

POLICY_BATTERY: dict = {
                           "delivery": DeliveryCheck(),
                           "waypoints": WaypointCheck(),
                           "scope": ScopeCheck()
                       }

DEFAULT_DENY_BATTERY: dict = {
                                 "default_deny": DefaultDenyCheck()
                             }


# Define battery functions

def run_all_battery(context: CheckContext, battery: dict,
                    check_eligibility: bool = True) -> list:
    """
    Run every check of a battery, in battery order, against one segment or deny probe.

    :param context: the segment (or deny-probe traversal) under check and the policy governing it
    :param battery: ordered dict of check name -> Check instance, e.g. POLICY_BATTERY
    :param check_eligibility: skip checks that do not apply to the context, e.g. waypoints on an undelivered segment
    :return: one entry per check: (Result carrying its violations, elapsed ms), or None for a skipped check
    """
    results: list = []
    for name in battery.keys():
        results.append(run_by_name_battery(name, context, battery, check_eligibility))
    return results


def run_by_name_battery(check_name: str,
                        context: CheckContext, battery: dict,
                        check_eligibility: bool = True) -> typing.Optional[tuple]:
    """
    Run a single named check of a battery against one segment or deny probe.

    :param check_name: key of the check in the battery, e.g. "scope"
    :param context: the segment (or deny-probe traversal) under check and the policy governing it
    :param battery: ordered dict of check name -> Check instance
    :param check_eligibility: return None instead of running when the check does not apply to the context
    :return: (Result carrying its violations, elapsed ms), or None when skipped
    :raises KeyError: when the battery has no check of that name
    """
    check: Check = battery[check_name]
    if check_eligibility and not check.is_eligible(context):
        return None
    return check.run(context)


def check_eligibility_all_battery(context: CheckContext, battery: dict) -> dict:
    """
    Narrow a battery to the checks that apply to a context. Running the result with check_eligibility off gives
    the same violations as running the full battery with it on.

    :param context: the segment (or deny-probe traversal) under check and the policy governing it
    :param battery: ordered dict of check name -> Check instance
    :return: the applicable checks, in battery order
    """
    return {name: check for name, check in battery.items() if check.is_eligible(context)}


def _violations_of(results: list) -> list:
    violations: list = []
    for entry in results:
        if entry is not None:
            violations.extend(entry[0].violations)
    return violations


# Define segment functions

def _merge(segments: list) -> Segment:
    sigma: list = list(segments[0].sigma)
    reach: set = set(segments[0].reach)
    for segment in segments[1:]:
        sigma.extend(segment.sigma[1:])
        reach.update(segment.reach)
    first: Segment = segments[0]
    return Segment(first.index, first.header, first.origin, tuple(sigma), frozenset(reach), segments[-1].last)


def governed_segments(policy_set: PolicySet, policy: Policy, traversal: Traversal) -> list:
    """
    Pair each part of a traversal with the policy governing it. The first segment belongs to the probed policy;
    after a rewrite the reborn packet is matched again from the rewrite point. Consecutive segments governed by the
    same policy are merged. A rewritten packet matching no policy is governed by the default deny.

    :param policy_set: the policies
    :param policy: the policy whose probe produced the traversal
    :param traversal: the traversal
    :return: list of (Policy or DEFAULT_DENY, Segment)
    :raises AmbiguousMatchError: when a reborn packet matches two equally specific policies
    """
    groups: list = []
    for segment in traversal.segments():
        governing = policy if segment.index == 0 else match_packet(policy_set, segment.header, segment.origin)
        if groups and groups[-1][0] == governing:
            groups[-1][1].append(segment)
        else:
            groups.append((governing, [segment]))
    return [(governing, _merge(segments)) for governing, segments in groups]


# Define checking functions

def _check_traversal(topology: Topology, policy_set: PolicySet,
                     policy: Policy, traversal: Traversal,
                     equivalents: typing.Optional[typing.Mapping],
                     follow_chain: bool) -> list:
    violations: list = []
    for governing, segment in governed_segments(policy_set, policy, traversal):
        if governing is DEFAULT_DENY:
            if follow_chain and segment.last:
                context = CheckContext(topology, policy_set, None, segment, traversal, equivalents)
                violations.extend(_violations_of(run_all_battery(context, DEFAULT_DENY_BATTERY)))
            continue
        if governing != policy and not follow_chain:
            continue
        context = CheckContext(topology, policy_set, governing, segment, traversal, equivalents)
        violations.extend(_violations_of(run_all_battery(context, POLICY_BATTERY)))
    return violations


def check_policy(topology: Topology, policy_set: PolicySet, policy: Policy,
                 equivalents: typing.Optional[typing.Mapping] = None,
                 hop_limit: int = DEFAULT_HOP_LIMIT,
                 follow_chain: bool = False) -> list:
    """
    Simulate the representative probe of a policy and run the policy battery on the part of the traversal the
    policy governs, i.e. up to the first rewrite handing the packet to another policy.

    :param topology: the topology
    :param policy_set: the policies, needed to match rewritten packets
    :param policy: the policy to check
    :param equivalents: optional mapping node -> nodes accepted in its place as waypoint (mirrors)
    :param hop_limit: the simulation hop limit
    :param follow_chain: also check the later segments against their own governing policies
    :return: the list of Violation found, empty if the policy holds
    """
    probe: Probe = policy_probe(policy, topology)
    traversal: Traversal = simulate(topology, probe.inject_at, probe.header, hop_limit)
    logger.debug("policy %s probe %s from %s: %s", policy.id, probe.header, probe.inject_at, traversal.outcome)
    return _check_traversal(topology, policy_set, policy, traversal, equivalents, follow_chain)


def check_deny_probe(topology: Topology, policy_set: PolicySet, probe: Probe,
                     hop_limit: int = DEFAULT_HOP_LIMIT) -> list:
    """
    Simulate a default-deny probe and report a breach if any host receives it.
    """
    traversal: Traversal = simulate(topology, probe.inject_at, probe.header, hop_limit)
    context: CheckContext = CheckContext(topology, policy_set, None, None, traversal)
    return _violations_of(run_all_battery(context, DEFAULT_DENY_BATTERY))


def check_all(topology: Topology, policy_set: PolicySet,
              equivalents: typing.Optional[typing.Mapping] = None,
              deny_ports: typing.Iterable = DENY_PROBE_PORTS,
              hop_limit: int = DEFAULT_HOP_LIMIT) -> ViolationReport:
    """
    Check a whole policy set over a topology: every policy through its probe, following rewrite chains so that each
    segment is checked against its governing policy, plus default-deny probes for every host pair no policy
    governs. Deny probe headers claimed by two equally specific policies are reported as configuration errors.
    Violations found through several chains are reported once.

    :param topology: the topology
    :param policy_set: the policies
    :param equivalents: optional mapping node -> nodes accepted in its place as waypoint (mirrors)
    :param deny_ports: destination ports of the default-deny probes
    :param hop_limit: the simulation hop limit
    :return: the ViolationReport, sorted by policy id then category
    """
    violations: list = []
    configuration_errors: list = []
    for policy in policy_set:
        try:
            violations.extend(check_policy(topology, policy_set, policy, equivalents, hop_limit, follow_chain=True))
        except AmbiguousMatchError as error:
            configuration_errors.append("policy " + policy.id + ": " + str(error))
        except ContractError as error:
            configuration_errors.append("policy " + policy.id + ": " + str(error))
    probes, ambiguities = classify_deny_headers(policy_set, topology, deny_ports)
    configuration_errors.extend(ambiguities)
    for probe in probes:
        violations.extend(check_deny_probe(topology, policy_set, probe, hop_limit))
    report: ViolationReport = ViolationReport(violations, configuration_errors)
    logger.info("checked %d policies over %d nodes: %d violations, %d configuration errors",
                len(policy_set), len(topology.node_ids), report.total, len(report.configuration_errors))
    return report


def compare_reports(first: ViolationReport, second: ViolationReport,
                    labels: tuple = ("naive", "planner")) -> Comparison:
    """
    Compare two reports category by category, e.g. before and after an extension plan.

    :param first: the baseline report
    :param second: the report to compare against the baseline
    :param labels: column labels of the two reports
    :return: the Comparison, deltas being second minus first
    """
    return Comparison(first, second, labels)
