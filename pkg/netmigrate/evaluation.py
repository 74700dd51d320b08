#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import concurrent.futures
import csv
import dataclasses
import io
import logging
import math
import typing

import numpy

# Import required src

from netmigrate.campus import REMOTE_SITE, ScenarioConfig, gen_campus, pick_migrated, sweep
from netmigrate.check import ViolationReport
from netmigrate.errors import InfeasibleError, NetMigrateError
from netmigrate.extend import CostModel, ExtensionPlan, apply_plan, map_policy_set, mirror_chain, naive_plan, \
    plan_equivalents
from netmigrate.functions import check_all
from netmigrate.netmodel import Topology
from netmigrate.planner import plan_extension
from netmigrate.policy import PolicySet
from netmigrate.traversal import DEFAULT_HOP_LIMIT

# Define module logger

logger: logging.Logger = logging.getLogger(__name__)

# Define the columns of the evaluation table, in output order

COLUMNS: tuple = ("scenario", "seed", "policies", "migrated", "inline_hosts", "naive_violations",
                  "planner_violations", "planner_cost", "mirrors", "wan_crossings", "proxies", "infeasible", "note")


@dataclasses.dataclass(frozen=True)
class EvalRow:
    """
    Outcome of one scenario: violations after naive relocation and after the planned extension, the cost of the
    plan and whether planning was infeasible. inline_hosts counts the migrated hosts sitting behind inline
    middleboxes, which the naive relocation necessarily bypasses.
    """
    scenario: str
    seed: int
    policies: int = 0
    migrated: int = 0
    inline_hosts: int = 0
    naive_violations: int = 0
    planner_violations: int = 0
    planner_cost: float = math.nan
    mirrors: int = 0
    wan_crossings: int = 0
    proxies: int = 0
    infeasible: bool = False
    note: str = ""

    def values(self) -> tuple:
        return tuple(getattr(self, column) for column in COLUMNS)


class EvalResult:
    """
    Rows of an evaluation sweep, sorted by seed, with their aggregates.
    """

    def __init__(self, rows: typing.Iterable):
        self._rows: tuple = tuple(sorted(rows, key=lambda row: (row.seed, row.scenario)))

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def aggregates(self) -> dict:
        feasible: list = [row for row in self._rows if not row.infeasible]
        naive: numpy.ndarray = numpy.array([row.naive_violations for row in self._rows], dtype=float)
        planner: numpy.ndarray = numpy.array([row.planner_violations for row in feasible], dtype=float)
        costs: numpy.ndarray = numpy.array([row.planner_cost for row in feasible], dtype=float)
        return {
            "scenarios": len(self._rows),
            "infeasible": len(self._rows) - len(feasible),
            "naive_with_violations": int(numpy.count_nonzero(naive)),
            "planner_with_violations": int(numpy.count_nonzero(planner)),
            "mean_naive_violations": float(numpy.mean(naive)) if naive.size else math.nan,
            "mean_planner_violations": float(numpy.mean(planner)) if planner.size else math.nan,
            "mean_planner_cost": float(numpy.nanmean(costs)) if costs.size else math.nan,
        }

    def to_csv(self) -> str:
        buffer: io.StringIO = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in self._rows:
            writer.writerow(_format(value) for value in row.values())
        return buffer.getvalue()

    def to_text(self) -> str:
        table: list = [COLUMNS] + [tuple(_format(value) for value in row.values()) for row in self._rows]
        widths: list = [max(len(str(line[position])) for line in table) for position in range(len(COLUMNS))]
        lines: list = ["  ".join(str(value).ljust(width) for value, width in zip(line, widths)).rstrip()
                       for line in table]
        for name, value in self.aggregates.items():
            lines.append(name + ": " + _format(value))
        return "\n".join(lines) + "\n"


def _format(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else "{:g}".format(value)
    return str(value)


def _extended_report(topology: Topology, policy_set: PolicySet, plan: ExtensionPlan,
                     hop_limit: int) -> ViolationReport:
    extended: Topology = apply_plan(topology, plan)
    return check_all(extended, map_policy_set(policy_set, plan), plan_equivalents(topology, extended, plan),
                     hop_limit=hop_limit)


def evaluate_scenario(config: ScenarioConfig,
                      cost_model: typing.Optional[CostModel] = None,
                      hop_limit: int = DEFAULT_HOP_LIMIT) -> EvalRow:
    """
    Run one scenario: generate the campus, relocate the chosen servers naively and with the planner, and check the
    policies on both results. Failures are recorded in the row, never raised.

    :param config: the ScenarioConfig
    :param cost_model: the weights of the planner cost
    :param hop_limit: the simulation hop limit
    :return: the EvalRow
    """
    try:
        topology, policy_set = gen_campus(config)
    except NetMigrateError as error:
        return EvalRow(config.scenario_id, config.seed, infeasible=True, note="generation failed: " + str(error).splitlines()[0])
    hosts: list = pick_migrated(config, topology)
    inline_hosts: int = 0
    for host in hosts:
        attachment = mirror_chain(topology, host)
        if attachment is not None and attachment.chain:
            inline_hosts += 1
    row: dict = {"scenario": config.scenario_id, "seed": config.seed, "policies": len(policy_set),
                 "migrated": len(hosts), "inline_hosts": inline_hosts}
    naive: ViolationReport = _extended_report(topology, policy_set, naive_plan(topology, hosts, REMOTE_SITE, policy_set),
                                              hop_limit)
    row["naive_violations"] = naive.total
    try:
        plan: ExtensionPlan = plan_extension(topology, policy_set, hosts, REMOTE_SITE, cost_model, hop_limit)
    except InfeasibleError as error:
        return EvalRow(infeasible=True, note="blocked by " + " ".join(error.policy_ids), **row)
    except NetMigrateError as error:
        return EvalRow(infeasible=True, note=str(error), **row)
    planned: ViolationReport = _extended_report(topology, policy_set, plan, hop_limit)
    logger.info("scenario %s: naive %d violations, planner %d violations at cost %s", config.scenario_id,
                naive.total, planned.total, plan.cost.total)
    return EvalRow(planner_violations=planned.total, planner_cost=plan.cost.total,
                   mirrors=plan.cost.mirrored_boxes, wan_crossings=plan.cost.wan_crossings,
                   proxies=plan.cost.proxies, **row)


def cmd_eval(base: ScenarioConfig, trials: int,
             cost_model: typing.Optional[CostModel] = None,
             hop_limit: int = DEFAULT_HOP_LIMIT,
             workers: int = 1) -> EvalResult:
    """
    Run an evaluation sweep of consecutive seeds. Scenarios are independent and may run in worker processes; rows
    are sorted by seed so the output does not depend on scheduling.

    :param base: the configuration of the first scenario
    :param trials: number of scenarios
    :param cost_model: the weights of the planner cost
    :param hop_limit: the simulation hop limit
    :param workers: number of worker processes
    :return: the EvalResult
    """
    configs: list = sweep(base, trials)
    if workers > 1 and len(configs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            rows: list = list(executor.map(evaluate_scenario, configs, [cost_model] * len(configs),
                                           [hop_limit] * len(configs)))
    else:
        rows = [evaluate_scenario(config, cost_model, hop_limit) for config in configs]
    return EvalResult(rows)
