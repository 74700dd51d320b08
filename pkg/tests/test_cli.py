#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import json

import pytest

# Import src

from netmigrate import cli
from netmigrate.errors import InfeasibleError
from netmigrate.extend import ExtensionPlan


@pytest.fixture
def files(tmp_path) -> tuple:
    topology: str = str(tmp_path / "campus.json")
    policies: str = str(tmp_path / "campus.policy")
    assert cli.main(["fixture", "--topology", topology, "--policies", policies]) == cli.EXIT_OK
    return topology, policies


def _rewrite_topology(path: str, change):
    with open(path, "r", encoding="utf-8") as handle:
        document: dict = json.load(handle)
    change(document)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle)


def test_fixture_to_stdout(capsys):
    assert cli.main(["fixture"]) == cli.EXIT_OK
    output: str = capsys.readouterr().out
    assert '"sites"' in output
    assert "policy P6:" in output


def test_check_conformant(files, capsys):
    topology, policies = files
    assert cli.main(["check", "--topology", topology, "--policies", policies]) == cli.EXIT_OK
    assert capsys.readouterr().out.endswith("total: 0\n")


def test_check_violations(files, capsys):
    topology, policies = files

    def open_f1(document: dict):
        next(entry for entry in document["nodes"] if entry["id"] == "F1")["middlebox"]["rules"][-1]["action"] = "allow"

    _rewrite_topology(topology, open_f1)
    assert cli.main(["check", "--topology", topology, "--policies", policies, "--json"]) == cli.EXIT_VIOLATIONS
    report: dict = json.loads(capsys.readouterr().out)
    assert report["totals"]["total"] > 0
    assert report["totals"]["per_category"]["DefaultDenyBreach"] == report["totals"]["total"]


def test_check_deny_ports(files):
    topology, policies = files
    assert cli.main(["check", "--topology", topology, "--policies", policies, "--deny-ports", "22,80"]) == cli.EXIT_OK


def test_invalid_topology(files, capsys):
    topology, policies = files
    _rewrite_topology(topology, lambda document: document["links"].append(["S1", "S9"]))
    assert cli.main(["check", "--topology", topology, "--policies", policies]) == cli.EXIT_INPUT
    assert "dangling link endpoint S9" in capsys.readouterr().err


def test_invalid_policies(files, tmp_path, capsys):
    topology, _ = files
    policies: str = str(tmp_path / "broken.policy")
    with open(policies, "w", encoding="utf-8") as handle:
        handle.write("policy X: [u_e, u1, *, 80, TCP] scope {Q9} waypoints [] occur {}\n")
    assert cli.main(["check", "--topology", topology, "--policies", policies]) == cli.EXIT_INPUT
    assert "1:" in capsys.readouterr().err


def test_input_errors(files, tmp_path):
    topology, policies = files
    assert cli.main(["check", "--topology", str(tmp_path / "missing.json"), "--policies", policies]) == cli.EXIT_INPUT
    assert cli.main(["check", "--topology", topology]) == cli.EXIT_INPUT
    assert cli.main(["teleport"]) == cli.EXIT_INPUT
    assert cli.main(["check", "--topology", topology, "--policies", policies, "--deny-ports", "x"]) == cli.EXIT_INPUT
    assert cli.main(["extend", "--topology", topology, "--policies", policies, "--hosts", "F1"]) == cli.EXIT_INPUT
    assert cli.main(["extend", "--topology", topology, "--policies", policies, "--hosts", "u1",
                     "--weights", "0,0,0"]) == cli.EXIT_INPUT


def test_extend(files, tmp_path, capsys):
    topology, policies = files
    plan_path: str = str(tmp_path / "plan.json")
    assert cli.main(["extend", "--topology", topology, "--policies", policies, "--hosts", "u1,v1",
                     "--plan", plan_path, "--compare"]) == cli.EXIT_OK
    output: str = capsys.readouterr().out
    assert output.startswith("policy homomorphism holds\n")
    assert "total: 0" in output
    with open(plan_path, "r", encoding="utf-8") as handle:
        plan: ExtensionPlan = ExtensionPlan.from_json(json.load(handle))
    assert plan.cost.total == 5.0


def test_extend_json(files, capsys):
    topology, policies = files
    assert cli.main(["extend", "--topology", topology, "--policies", policies, "--hosts", "u1", "--restricted",
                     "--json", "--compare"]) == cli.EXIT_OK
    document: dict = json.loads(capsys.readouterr().out)
    assert set(document) == {"plan", "verdict", "post_check", "comparison"}
    assert document["verdict"]["holds"] is True
    assert not any(action["action"] == "mirror" for action in document["plan"]["actions"])
    assert document["comparison"]["total"]["planner"] == 0
    assert document["comparison"]["total"]["naive"] > 0


def test_extend_infeasible(files, monkeypatch, capsys):
    topology, policies = files

    def blocked(*arguments, **keywords):
        raise InfeasibleError(["P2"], "policy homomorphism fails")

    monkeypatch.setattr(cli, "plan_extension", blocked)
    assert cli.main(["extend", "--topology", topology, "--policies", policies, "--hosts", "u1"]) == \
        cli.EXIT_INFEASIBLE
    assert "blocked by P2" in capsys.readouterr().err


def test_eval(tmp_path, capsys):
    csv_path: str = str(tmp_path / "results.csv")
    assert cli.main(["eval", "--seed", "2", "--trials", "2", "--csv", csv_path]) == cli.EXIT_OK
    assert "scenarios: 2" in capsys.readouterr().out
    with open(csv_path, "r", encoding="utf-8") as handle:
        assert len(handle.read().splitlines()) == 3


def test_eval_rejects_bad_parameters():
    assert cli.main(["eval", "--subnets", "0"]) == cli.EXIT_INPUT
