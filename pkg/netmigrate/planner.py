#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import concurrent.futures
import dataclasses
import itertools
import logging
import typing

# Import required src

from netmigrate.check import ViolationReport
from netmigrate.errors import ContractError, InfeasibleError, NetMigrateError
from netmigrate.extend import MIRROR, PROXY, CostModel, ExtensionPlan, HomomorphismVerdict, apply_plan, build_plan, \
    map_policy_set, mirror_chain, plan_cost, plan_equivalents, verify_homomorphism, require_hosts
from netmigrate.functions import check_all
from netmigrate.netmodel import Flexibility, SiteKind, Topology
from netmigrate.policy import PolicySet
from netmigrate.traversal import DEFAULT_HOP_LIMIT

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define the largest number of migrated hosts for which every strategy combination is evaluated

EXHAUSTIVE_BOUND: int = 4


@dataclasses.dataclass(frozen=True)
class Candidate:
    """
    An evaluated strategy assignment: the costed plan when it preserves every policy, else the blocking policies.
    """
    strategies: tuple
    plan: typing.Optional[ExtensionPlan]
    blocking: tuple = ()
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.plan is not None

    def key(self) -> tuple:
        return self.plan.cost.total, len(self.plan.actions), self.plan.actions_key()


def host_strategies(topology: Topology, host: str, site: str) -> tuple:
    """
    The strategies applicable to a host: a proxy always, mirroring its inline middleboxes when the host is attached
    through inline middleboxes only and the site accepts middleboxes (or none need mirroring).
    """
    strategies: list = [PROXY]
    attachment = mirror_chain(topology, host)
    if attachment is not None:
        if not attachment.chain or topology.site(site).flexibility is Flexibility.FULL:
            strategies.append(MIRROR)
    return tuple(strategies)


def evaluate_strategies(topology: Topology, policy_set: PolicySet, site: str,
                        strategies: typing.Mapping, cost_model: CostModel,
                        hop_limit: int = DEFAULT_HOP_LIMIT) -> Candidate:
    """
    Build, apply, verify and cost the plan relocating each host with its own strategy.

    :param topology: the original topology
    :param policy_set: the original policies
    :param site: the remote site
    :param strategies: mapping host -> strategy
    :param cost_model: the weights of the cost components
    :param hop_limit: the simulation hop limit
    :return: the Candidate, with a costed plan only if the extension preserves every policy
    """
    assignment: tuple = tuple(sorted(strategies.items()))
    try:
        plan: ExtensionPlan = build_plan(topology, policy_set, site, strategies)
        extended: Topology = apply_plan(topology, plan)
    except NetMigrateError as error:
        return Candidate(assignment, None, (), str(error))
    verdict: HomomorphismVerdict = verify_homomorphism(topology, extended, policy_set, plan, hop_limit)
    if not verdict.holds:
        return Candidate(assignment, None, tuple(verdict.failing_policies), "policy homomorphism fails")
    mapped: PolicySet = map_policy_set(policy_set, plan)
    report: ViolationReport = check_all(extended, mapped, plan_equivalents(topology, extended, plan),
                                        hop_limit=hop_limit)
    if report.total or report.configuration_errors:
        return Candidate(assignment, None, tuple(sorted(report.per_policy_counts)), "extended network violations")
    costed: ExtensionPlan = dataclasses.replace(plan, cost=plan_cost(extended, mapped, plan, cost_model, hop_limit))
    return Candidate(assignment, costed)


def _evaluate_all(topology: Topology, policy_set: PolicySet, site: str,
                  assignments: list, cost_model: CostModel,
                  hop_limit: int, workers: int) -> list:
    if workers > 1 and len(assignments) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            futures: list = [executor.submit(evaluate_strategies, topology, policy_set, site, assignment,
                                             cost_model, hop_limit) for assignment in assignments]
            return [future.result() for future in futures]
    return [evaluate_strategies(topology, policy_set, site, assignment, cost_model, hop_limit)
            for assignment in assignments]


def _best(candidates: list) -> typing.Optional[Candidate]:
    feasible: list = [candidate for candidate in candidates if candidate.feasible]
    if not feasible:
        return None
    return min(feasible, key=Candidate.key)


def plan_extension(topology: Topology, policy_set: PolicySet,
                   hosts: typing.Iterable, site: str,
                   cost_model: typing.Optional[CostModel] = None,
                   hop_limit: int = DEFAULT_HOP_LIMIT,
                   workers: int = 1) -> ExtensionPlan:
    """
    Plan a policy preserving relocation of hosts into a remote site. Each host is either proxied (its traffic
    hairpins through the original enterprise path) or moved behind a remote switch together with mirrors of its
    inline middleboxes. With few hosts every combination is evaluated, otherwise hosts are improved greedily one at
    a time. Every candidate is applied, verified for policy homomorphism and checked for violations; the cheapest
    surviving plan is returned, ties broken by fewer actions then by the serialized action list.

    :param topology: the original conformant topology
    :param policy_set: the policies it enforces
    :param hosts: the enterprise hosts to relocate
    :param site: the remote data center site
    :param cost_model: the weights of the cost components, unit weights by default
    :param hop_limit: the simulation hop limit
    :param workers: number of threads evaluating candidates
    :return: the chosen ExtensionPlan, costed
    :raises ContractError: when a host is not an enterprise host, the site is not a remote data center or the
        original network violates its policies
    :raises InfeasibleError: when no candidate preserves every policy
    """
    cost_model = cost_model or CostModel()
    hosts = require_hosts(topology, hosts)
    if topology.site(site).kind is not SiteKind.REMOTE_DC:
        raise ContractError("site " + site + " is not a remote data center")
    if not hosts:
        return ExtensionPlan(cost=cost_model.evaluate(0, 0, 0))
    baseline: ViolationReport = check_all(topology, policy_set, hop_limit=hop_limit)
    if baseline.total or baseline.configuration_errors:
        raise ContractError("the original network violates its policies (" + str(baseline.total) + " violations)")
    options: dict = {host: host_strategies(topology, host, site) for host in hosts}
    if len(hosts) <= EXHAUSTIVE_BOUND:
        assignments: list = [dict(zip(hosts, choice)) for choice in itertools.product(*(options[host] for host in hosts))]
        candidates: list = _evaluate_all(topology, policy_set, site, assignments, cost_model, hop_limit, workers)
        best: typing.Optional[Candidate] = _best(candidates)
    else:
        current: dict = {host: PROXY for host in hosts}
        candidates = []
        best = None
        for host in hosts:
            assignments = [dict(current, **{host: strategy}) for strategy in options[host]]
            round_candidates: list = _evaluate_all(topology, policy_set, site, assignments, cost_model, hop_limit,
                                                   workers)
            candidates.extend(round_candidates)
            round_best: typing.Optional[Candidate] = _best(round_candidates)
            if round_best is not None:
                current = dict(round_best.strategies)
                best = round_best
    if best is None:
        blocking: set = set()
        reasons: set = set()
        for candidate in candidates:
            blocking.update(candidate.blocking)
            reasons.add(candidate.reason)
        raise InfeasibleError(sorted(blocking), "; ".join(sorted(reason for reason in reasons if reason)))
    logger.info("planned %s for %d hosts: %d actions, cost %s", dict(best.strategies), len(hosts),
                len(best.plan.actions), best.plan.cost.total)
    return best.plan
