import json
import math
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from main import cli
from pipeline import Command, OutputFormat, RunConfig, run
from pipeline.report import format_number, normalize
from pipeline.runner import exit_code
from regularity.errors import ConfigInvalid
from regularity.profiles import Family
from regularity.verdicts import Status


def _verdicts(report):
    return {v["criterion"]: v for v in report["verdicts"]}


@pytest.mark.parametrize("overrides", [
    {"command": "classify"},
    {"command": "example", "which": 1},
    {"command": "classify", "profile": {"family": "ex3"}},
    {"command": "classify", "profile": {"family": "zero"}, "n": 4},
    {"command": "classify", "profile": {"family": "zero"}, "step": 0.1},
    {"command": "classify", "profile": {"family": "zero"}, "colour": "red"},
    {"command": "classify", "profile": {"family": "zero"}, "formats": []},
])
def test_invalid_configs(overrides):
    with pytest.raises(ConfigInvalid):
        RunConfig.load(None, overrides)


def test_unreadable_config_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigInvalid):
        RunConfig.load(path)


def test_config_file_and_override_precedence(tmp_path, monkeypatch):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "command": "classify",
        "n": 3,
        "t_max": 30,
        "profile": {"family": "EX1_POS", "gamma": 2.0},
        "formats": ["csv", "json", "csv"],
    }))
    config = RunConfig.load(path, {"n": 2, "profile": {"gamma": 1.5}, "step": None})
    assert config.command is Command.CLASSIFY
    assert config.n == 2
    assert config.t_max == 30.0
    assert config.step == 1e-3
    assert config.profile.family is Family.EX1_POS
    assert config.profile.gamma == 1.5
    assert config.formats == [OutputFormat.JSON, OutputFormat.CSV]
    assert config.out_dir == Path("out")

    monkeypatch.setenv("GSLAB_OUT", str(tmp_path / "env"))
    assert RunConfig.load(path).out_dir == tmp_path / "env"


def test_example_config_builds_its_profile():
    config = RunConfig.load(None, {"command": "example", "which": 1, "gamma": 0.5, "negative": True})
    p = config.build_profile()
    assert p.family is Family.EX1_NEG
    assert p.gamma == 0.5
    assert p.t_max == 40.0


def test_example_one_is_c1(tmp_path):
    config = RunConfig.load(None, {"command": "example", "which": 1, "gamma": 2.0, "out_dir": str(tmp_path)})
    outcome = run(config)
    assert outcome.exit_code == 0
    verdicts = _verdicts(outcome.report)
    assert verdicts["lipschitz_at_0"]["status"] == "HOLDS_ANALYTIC"
    assert verdicts["c1_neighborhood"]["status"] == "HOLDS_ANALYTIC"
    assert verdicts["dini_mean_oscillation"]["paper_tag"] == "Appendix"
    assert outcome.report["command"] == "example"
    assert outcome.report["profile"]["family"] == "ex1_pos"
    assert outcome.report["artifacts"] == ["stability.csv"]
    assert (tmp_path / "report.json").exists()
    assert set(pd.read_csv(tmp_path / "stability.csv").columns) == {"t", "S", "running_min"}


def test_example_three_is_lipschitz_without_dini_mean_oscillation(tmp_path):
    config = RunConfig.load(None, {"command": "example", "which": 3, "A": 10.0,
                                   "out_dir": str(tmp_path), "formats": ["json"]})
    outcome = run(config)
    assert outcome.exit_code == 0
    verdicts = _verdicts(outcome.report)
    assert verdicts["lipschitz_at_0"]["status"] == "HOLDS_NUMERIC_WINDOW"
    assert verdicts["lipschitz_at_0"]["paper_tag"] == "Prop2"
    assert verdicts["dini_mean_oscillation"]["status"] == "FAILS_ANALYTIC"
    assert outcome.report["artifacts"] == []
    assert "z_bound" in outcome.report["results"]


def test_solve_z_writes_the_linear_solution(tmp_path):
    config = RunConfig.load(None, {"command": "solve-z", "n": 3, "profile": {"family": "zero"},
                                   "out_dir": str(tmp_path), "formats": ["csv"]})
    outcome = run(config)
    assert outcome.exit_code == 0
    assert not (tmp_path / "report.json").exists()
    frame = pd.read_csv(tmp_path / "z.csv")
    np.testing.assert_allclose(frame["v_over_r"], 1.0, atol=1e-8)


def test_stability_and_oscillation_commands(tmp_path):
    for command, artifact in (("stability", "stability.csv"), ("oscillation", "oscillation.csv")):
        config = RunConfig.load(None, {"command": command, "profile": {"family": "ex2", "beta": 2.0},
                                       "out_dir": str(tmp_path / command)})
        outcome = run(config)
        assert outcome.exit_code == 0
        assert outcome.report["artifacts"] == [artifact]


def test_oracle_command(tmp_path):
    config = RunConfig.load(None, {
        "command": "oracle",
        "profile": {"family": "ex1_pos", "gamma": 2.0},
        "boundary": {"modes": [{"k": 1, "amplitude": 1.0}, {"k": 2, "amplitude": 0.5, "kind": "sin"}]},
        "out_dir": str(tmp_path),
    })
    outcome = run(config)
    assert outcome.exit_code == 0
    verdicts = _verdicts(outcome.report)
    assert verdicts["comparison_monotone"]["status"] == "HOLDS_NUMERIC_WINDOW"
    assert outcome.report["results"]["fd2d"]["relative_l2_vs_modes"] < 1e-3
    assert outcome.report["artifacts"] == ["comparison.csv", "fd2d.csv"]


def test_runs_are_byte_identical(tmp_path):
    texts = []
    for name in ("a", "b"):
        config = RunConfig.load(None, {"command": "classify", "profile": {"family": "ex2", "beta": 2.0},
                                       "out_dir": str(tmp_path / name)})
        run(config)
        texts.append(((tmp_path / name / "report.json").read_bytes(),
                      (tmp_path / name / "stability.csv").read_bytes()))
    assert texts[0] == texts[1]


def test_domain_errors_land_in_the_report(tmp_path):
    config = RunConfig.load(None, {"command": "example", "which": 3, "A": 1.0,
                                   "out_dir": str(tmp_path), "formats": ["csv"]})
    outcome = run(config)
    assert outcome.exit_code == 1
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["error"]["type"] == "ValueError"
    assert report["verdicts"] == []
    assert report["profile"] is None


def test_exit_codes():
    inconclusive = {"status": str(Status.INCONCLUSIVE)}
    holds = {"status": str(Status.HOLDS_ANALYTIC)}
    assert exit_code([holds, inconclusive], None) == 0
    assert exit_code([inconclusive, inconclusive], None) == 2
    assert exit_code([holds], {"type": "OutOfDomain", "message": "x"}) == 1
    assert exit_code([], None) == 0


class _Colour(Enum):
    RED = "red"

    def __str__(self) -> str:
        return self.value


def test_number_formatting():
    assert format_number(1.0 / 3.0) == 0.333333333333
    assert format_number(math.inf) == "inf"
    assert format_number(-math.inf) == "-inf"
    assert format_number(math.nan) == "nan"
    assert normalize({1: np.float64(2.0), "b": (np.int64(3), np.bool_(True)), "c": _Colour.RED,
                      "d": Path("out/x.csv"), "e": np.array([0.5, math.inf])}) == {
        "1": 2.0, "b": [3, True], "c": "red", "d": "out/x.csv", "e": [0.5, "inf"],
    }


def test_cli_classify(tmp_path):
    result = CliRunner().invoke(cli, ["classify", "--family", "ex1_pos", "--gamma", "2",
                                      "--out", str(tmp_path), "--format", "json"])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["command"] == "classify"
    assert report["schema_version"] == 1
    assert str(tmp_path / "report.json") in result.output


def test_cli_example_and_bad_input(tmp_path):
    runner = CliRunner()
    result = runner.invoke(cli, ["example", "--which", "2", "--beta", "2", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert runner.invoke(cli, ["classify", "--out", str(tmp_path)]).exit_code == 1
    assert runner.invoke(cli, ["oracle", "--family", "zero", "--mode", "bad"]).exit_code == 2


def test_every_verdict_carries_a_citation_tag(tmp_path):
    config = RunConfig.load(None, {"command": "classify", "profile": {"family": "ex1_neg", "gamma": 0.75},
                                   "out_dir": str(tmp_path), "formats": ["json"]})
    outcome = run(config)
    tags = {"Prop1", "Prop1-Corollary", "Prop2", "Prop3", "Thm2", "Appendix"}
    assert outcome.report["verdicts"]
    for record in outcome.report["verdicts"] + outcome.report["results"]["modulus"]:
        assert list(record) == ["criterion", "status", "evidence", "paper_tag"]
        assert record["paper_tag"] in tags
    verdicts = _verdicts(outcome.report)
    assert verdicts["lipschitz_at_0"]["paper_tag"] == "Prop1"
    assert verdicts["grad_zero_at_0"]["paper_tag"] == "Prop1-Corollary"


def test_profile_object_may_carry_dimension_and_window():
    profile = {"family": "ex1_pos", "gamma": 0.75, "n": 3, "t_max": 40}
    config = RunConfig.load(None, {"command": "classify", "profile": profile})
    assert (config.n, config.t_max) == (3, 40.0)
    p = config.build_profile()
    assert (p.n, p.t_max) == (3, 40.0)

    config = RunConfig.load(None, {"command": "classify", "n": 3, "profile": {**profile, "t_max": 50}})
    assert config.build_profile().t_max == 50.0
    with pytest.raises(ConfigInvalid, match="disagrees"):
        RunConfig.load(None, {"command": "classify", "n": 2, "profile": profile})
