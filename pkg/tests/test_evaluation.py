#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import csv
import io
import math

import pytest

# Import src

from netmigrate import evaluation
from netmigrate.campus import ScenarioConfig
from netmigrate.errors import InfeasibleError, ScenarioError
from netmigrate.evaluation import COLUMNS, EvalResult, EvalRow, cmd_eval, evaluate_scenario


@pytest.fixture(scope="module")
def sweep_result() -> EvalResult:
    return cmd_eval(ScenarioConfig(seed=1, subnets=2, hosts_per_subnet=2, middlebox_density=0.6), 4)


def test_empty_sweep():
    result: EvalResult = cmd_eval(ScenarioConfig(), 0)
    assert result.rows == ()
    assert result.to_csv() == ",".join(COLUMNS) + "\n"
    assert result.aggregates["scenarios"] == 0
    assert math.isnan(result.aggregates["mean_planner_cost"])


def test_rows_sorted_by_seed(sweep_result):
    assert [row.seed for row in sweep_result.rows] == [1, 2, 3, 4]


def test_naive_breaks_inline_hosts(sweep_result):
    for row in sweep_result.rows:
        if row.inline_hosts > 0:
            assert row.naive_violations >= 1, row


def test_planner_preserves_policies(sweep_result):
    for row in sweep_result.rows:
        assert row.infeasible or row.planner_violations == 0, row
        if not row.infeasible:
            assert row.planner_cost >= 0.0
            assert row.migrated >= 1


def test_csv_is_deterministic(sweep_result):
    again: EvalResult = cmd_eval(ScenarioConfig(seed=1, subnets=2, hosts_per_subnet=2, middlebox_density=0.6), 4)
    assert again.to_csv() == sweep_result.to_csv()
    rows: list = list(csv.reader(io.StringIO(sweep_result.to_csv())))
    assert tuple(rows[0]) == COLUMNS
    assert len(rows) == 5
    assert rows[1][COLUMNS.index("infeasible")] in ("yes", "no")


def test_worker_processes_give_the_same_rows():
    base: ScenarioConfig = ScenarioConfig(seed=20)
    assert cmd_eval(base, 2, workers=2).to_csv() == cmd_eval(base, 2).to_csv()


def test_text_lists_aggregates(sweep_result):
    text: str = sweep_result.to_text()
    assert text.splitlines()[0].split() == list(COLUMNS)
    assert "scenarios: 4" in text
    assert "mean_planner_cost: " in text


def test_generation_failure_is_recorded(monkeypatch):
    def failing(config):
        raise ScenarioError("no conformant campus\ndetails")
    monkeypatch.setattr(evaluation, "gen_campus", failing)
    row: EvalRow = evaluate_scenario(ScenarioConfig(seed=3))
    assert row.infeasible
    assert row.note == "generation failed: no conformant campus"


def test_infeasible_plan_is_recorded(monkeypatch):
    def blocked(*arguments, **keywords):
        raise InfeasibleError(["P2", "P1"])
    monkeypatch.setattr(evaluation, "plan_extension", blocked)
    row: EvalRow = evaluate_scenario(ScenarioConfig(seed=3))
    assert row.infeasible
    assert row.note == "blocked by P1 P2"
    assert math.isnan(row.planner_cost)
    result: EvalResult = EvalResult([row])
    assert result.aggregates["infeasible"] == 1
    assert "nan" in result.to_csv()
