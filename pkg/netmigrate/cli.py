#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import argparse
import json
import logging
import sys
import typing

# Import required src

from netmigrate.campus import ScenarioConfig
from netmigrate.check import ViolationReport
from netmigrate.dsl import parse_policy_set, render_policy_set
from netmigrate.errors import ContractError, InfeasibleError, NetMigrateError, PolicyParseError, TopologyError
from netmigrate.evaluation import EvalResult, cmd_eval
from netmigrate.extend import CostModel, ExtensionPlan, HomomorphismVerdict, apply_plan, map_policy_set, naive_plan, \
    plan_equivalents, verify_homomorphism, with_site_flexibility
from netmigrate.fixture import FIXTURE_POLICIES, fixture_document
from netmigrate.functions import check_all, compare_reports
from netmigrate.netmodel import Flexibility, SiteKind, Topology, build_topology, validate_topology
from netmigrate.planner import plan_extension
from netmigrate.policy import PolicySet
from netmigrate.traversal import DEFAULT_HOP_LIMIT, DENY_PROBE_PORTS

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define exit codes

EXIT_OK: int = 0
EXIT_VIOLATIONS: int = 1
EXIT_INPUT: int = 2
EXIT_INFEASIBLE: int = 3


# Define argument helpers

def _int_list(text: str) -> tuple:
    try:
        return tuple(int(item) for item in text.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma separated list of integers, got " + repr(text)) from None


def _name_list(text: str) -> tuple:
    return tuple(item.strip() for item in text.split(",") if item.strip())


def _weights(text: str) -> CostModel:
    try:
        mirror, wan, proxy = (float(item) for item in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected three comma separated weights, got " + repr(text)) from None
    try:
        return CostModel(mirror, wan, proxy)
    except ContractError as error:
        raise argparse.ArgumentTypeError(str(error)) from None


def build_parser() -> argparse.ArgumentParser:
    parser: argparse.ArgumentParser = argparse.ArgumentParser(
        prog="netmigrate", description="Check network policies and plan policy preserving server relocation")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress (-v) or every step (-vv)")
    commands = parser.add_subparsers(dest="command", required=True)
    # Check
    check = commands.add_parser("check", help="check a topology against a policy set")
    check.add_argument("--topology", required=True, help="topology JSON document")
    check.add_argument("--policies", required=True, help="policy DSL document")
    check.add_argument("--json", action="store_true", help="print the report as JSON")
    check.add_argument("--hop-limit", type=int, default=DEFAULT_HOP_LIMIT)
    check.add_argument("--deny-ports", type=_int_list, default=DENY_PROBE_PORTS,
                       help="destination ports of the default-deny probes (comma separated)")
    # Extend
    extend = commands.add_parser("extend", help="plan the relocation of hosts into a remote site")
    extend.add_argument("--topology", required=True, help="topology JSON document")
    extend.add_argument("--policies", required=True, help="policy DSL document")
    extend.add_argument("--hosts", required=True, type=_name_list, help="hosts to relocate (comma separated)")
    extend.add_argument("--site", help="remote site, the first remote data center by default")
    extend.add_argument("--restricted", action="store_true", help="treat the remote site as rejecting middleboxes")
    extend.add_argument("--weights", type=_weights, default=CostModel(),
                        help="cost weights of mirrors, tunnel crossings and proxies (comma separated)")
    extend.add_argument("--plan", help="write the plan JSON to this file instead of stdout")
    extend.add_argument("--compare", action="store_true", help="also report the naive relocation")
    extend.add_argument("--json", action="store_true", help="print the verdict as JSON")
    extend.add_argument("--hop-limit", type=int, default=DEFAULT_HOP_LIMIT)
    extend.add_argument("--workers", type=int, default=1, help="threads evaluating candidate plans")
    # Eval
    evaluate = commands.add_parser("eval", help="compare naive and planned relocation on generated campuses")
    evaluate.add_argument("--seed", type=int, default=1, help="seed of the first scenario")
    evaluate.add_argument("--trials", type=int, default=10, help="number of scenarios")
    evaluate.add_argument("--subnets", type=int, default=2)
    evaluate.add_argument("--hosts-per-subnet", type=int, default=2)
    evaluate.add_argument("--density", type=float, default=0.5, help="middlebox density in [0, 1]")
    evaluate.add_argument("--policies-per-subnet", type=int, default=2)
    evaluate.add_argument("--migrate", type=float, default=0.5, help="fraction of servers to relocate in (0, 1]")
    evaluate.add_argument("--restricted", action="store_true", help="the data center rejects middleboxes")
    evaluate.add_argument("--weights", type=_weights, default=CostModel())
    evaluate.add_argument("--csv", help="write the rows as CSV to this file")
    evaluate.add_argument("--hop-limit", type=int, default=DEFAULT_HOP_LIMIT)
    evaluate.add_argument("--workers", type=int, default=1, help="worker processes running scenarios")
    # Fixture
    fixture = commands.add_parser("fixture", help="dump the built-in motivating example")
    fixture.add_argument("--topology", help="write the topology JSON to this file")
    fixture.add_argument("--policies", help="write the policy document to this file")
    return parser


# Define loading functions

def load_topology(path: str) -> Topology:
    with open(path, "r", encoding="utf-8") as handle:
        document: dict = json.load(handle)
    topology: Topology = build_topology(document)
    for issue in validate_topology(topology):
        logger.warning("%s: %s", path, issue)
    return topology


def load_policies(path: str, topology: Topology) -> PolicySet:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_policy_set(handle.read(), topology)


def _write(path: typing.Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


# Define commands

def cmd_check(arguments: argparse.Namespace) -> int:
    topology: Topology = load_topology(arguments.topology)
    policy_set: PolicySet = load_policies(arguments.policies, topology)
    report: ViolationReport = check_all(topology, policy_set, deny_ports=arguments.deny_ports,
                                        hop_limit=arguments.hop_limit)
    sys.stdout.write(report.dumps() + "\n" if arguments.json else report.to_text())
    return EXIT_OK if report.total == 0 and not report.configuration_errors else EXIT_VIOLATIONS


def _remote_site(topology: Topology, site: typing.Optional[str]) -> str:
    if site is not None:
        return topology.site(site).id
    remote: list = [candidate.id for candidate in topology.sites if candidate.kind is SiteKind.REMOTE_DC]
    if not remote:
        raise NetMigrateError("the topology has no remote data center site")
    return remote[0]


def _extended_report(topology: Topology, policy_set: PolicySet, plan: ExtensionPlan,
                     hop_limit: int) -> tuple:
    extended: Topology = apply_plan(topology, plan)
    report: ViolationReport = check_all(extended, map_policy_set(policy_set, plan),
                                        plan_equivalents(topology, extended, plan), hop_limit=hop_limit)
    return extended, report


def cmd_extend(arguments: argparse.Namespace) -> int:
    topology: Topology = load_topology(arguments.topology)
    policy_set: PolicySet = load_policies(arguments.policies, topology)
    site: str = _remote_site(topology, arguments.site)
    if arguments.restricted:
        topology = with_site_flexibility(topology, site, Flexibility.RESTRICTED)
    plan: ExtensionPlan = plan_extension(topology, policy_set, arguments.hosts, site, arguments.weights,
                                         arguments.hop_limit, arguments.workers)
    extended, report = _extended_report(topology, policy_set, plan, arguments.hop_limit)
    verdict: HomomorphismVerdict = verify_homomorphism(topology, extended, policy_set, plan, arguments.hop_limit)
    if arguments.plan is not None or not arguments.json:
        _write(arguments.plan, plan.dumps() + "\n")
    comparison = None
    if arguments.compare:
        _, naive = _extended_report(topology, policy_set, naive_plan(topology, arguments.hosts, site, policy_set),
                                    arguments.hop_limit)
        comparison = compare_reports(naive, report)
    if arguments.json:
        document: dict = {"plan": plan.to_json(), "verdict": verdict.to_json(), "post_check": report.to_json()}
        if comparison is not None:
            document["comparison"] = {row[0]: {"naive": row[1], "planner": row[2], "delta": row[3]}
                                      for row in comparison.rows}
        sys.stdout.write(json.dumps(document, indent=2) + "\n")
    else:
        sys.stdout.write("policy homomorphism " + ("holds" if verdict.holds else "fails") + "\n")
        sys.stdout.write(report.to_text())
        if comparison is not None:
            sys.stdout.write(comparison.to_text())
    return EXIT_OK if verdict.holds and report.total == 0 else EXIT_VIOLATIONS


def cmd_evaluate(arguments: argparse.Namespace) -> int:
    base: ScenarioConfig = ScenarioConfig(arguments.seed, arguments.subnets, arguments.hosts_per_subnet,
                                          arguments.density, arguments.policies_per_subnet, arguments.migrate,
                                          arguments.restricted)
    result: EvalResult = cmd_eval(base, arguments.trials, arguments.weights, arguments.hop_limit, arguments.workers)
    sys.stdout.write(result.to_text())
    if arguments.csv is not None:
        _write(arguments.csv, result.to_csv())
    return EXIT_OK


def cmd_fixture(arguments: argparse.Namespace) -> int:
    topology: Topology = build_topology(fixture_document())
    text: str = render_policy_set(parse_policy_set(FIXTURE_POLICIES, topology), topology)
    document: str = json.dumps(fixture_document(), indent=2) + "\n"
    if arguments.topology is None and arguments.policies is None:
        sys.stdout.write(document + "\n" + text)
        return EXIT_OK
    if arguments.topology is not None:
        _write(arguments.topology, document)
    if arguments.policies is not None:
        _write(arguments.policies, text)
    return EXIT_OK


COMMANDS: dict = {
    "check": cmd_check,
    "extend": cmd_extend,
    "eval": cmd_evaluate,
    "fixture": cmd_fixture,
}


def main(argv: typing.Optional[list] = None) -> int:
    """
    Command line entry point.

    :param argv: the arguments, sys.argv[1:] by default
    :return: the exit code: 0 success, 1 violations, 2 input errors, 3 infeasible extension
    """
    parser: argparse.ArgumentParser = build_parser()
    try:
        arguments: argparse.Namespace = parser.parse_args(argv)
    except SystemExit as exit_request:
        return EXIT_OK if exit_request.code in (0, None) else EXIT_INPUT
    level: int = (logging.WARNING, logging.INFO, logging.DEBUG)[min(arguments.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[arguments.command](arguments)
    except InfeasibleError as error:
        sys.stderr.write("infeasible: " + str(error) + "\n")
        return EXIT_INFEASIBLE
    except TopologyError as error:
        sys.stderr.write("invalid topology:\n" + "".join("  " + issue + "\n" for issue in error.issues))
        return EXIT_INPUT
    except PolicyParseError as error:
        sys.stderr.write("invalid policies:\n" + "".join("  " + str(issue) + "\n" for issue in error.issues))
        return EXIT_INPUT
    except (NetMigrateError, OSError, ValueError, argparse.ArgumentTypeError) as error:
        sys.stderr.write("error: " + str(error) + "\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
