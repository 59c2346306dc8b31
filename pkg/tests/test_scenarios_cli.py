"""Scenario files, report rendering, and the command-line interface."""

import json
import re

import pytest

from tubecomp.cli import main
from tubecomp.report import render_csv, render_json, run_scenario, write_report
from tubecomp.scenarios import (
    BUILTIN_SCENARIOS,
    ScenarioError,
    load_scenario,
    parse_scenario_text,
    resolve_scenario,
)

GOOD = """\
# dilation pair at a fractional weight
name = demo
n = 1
gamma = 2.5
phi = z1
psi = 2*z1
expected.bounded = true
expected.compact = false
cfg.seed = 3
cfg.schedule_steps = 12
"""

INCONCLUSIVE_TEXT = """\
name = still-climbing
n = 1
gamma = 1
phi = z1
psi = z1 + i
expected.bounded = true
expected.compact = false
cfg.starts = 1
cfg.refine_steps = 0
cfg.schedule_steps = 16
"""


class TestScenarioParsing:
    def test_happy_path(self):
        sc = parse_scenario_text(GOOD)
        assert sc.name == "demo"
        assert sc.n == 1
        assert sc.gamma == (2.5,)
        assert sc.phi_text == "z1"
        assert sc.psi_text == "2 * z1"
        assert sc.expected_bounded is True
        assert sc.expected_compact is False
        cfg = sc.config()
        assert cfg.seed == 3
        assert all(s.steps == 12 for s in cfg.boundary_schedules)

    @pytest.mark.parametrize(
        "mangle,fragment",
        [
            (lambda t: t + "name = again\n", "line 11: duplicate key 'name'"),
            (lambda t: t.replace("gamma = 2.5\n", ""), "missing required key 'gamma'"),
            (lambda t: t + "mystery = 1\n", "line 11: unknown key 'mystery'"),
            (lambda t: t.replace("gamma = 2.5", "gamma = 2.5, 1.0"), "line 4: gamma has 2 entries"),
            (lambda t: t.replace("gamma = 2.5", "gamma = -1"), "line 4: gamma entries must be positive"),
            (lambda t: t.replace("name = demo", "name = b@d"), "line 2"),
            (lambda t: t.replace("true", "maybe"), "line 7: expected true or false"),
        ],
    )
    def test_errors_carry_line_numbers(self, mangle, fragment):
        with pytest.raises(ScenarioError) as err:
            parse_scenario_text(mangle(GOOD))
        assert fragment in str(err.value)

    def test_builtin_names(self):
        assert sorted(BUILTIN_SCENARIOS) == [
            "dilation-1d",
            "identity-pair",
            "inversion-shift-1d",
            "translation-1d",
            "translation-2d",
        ]

    def test_resolve_prefers_builtin(self):
        assert resolve_scenario("translation-1d") is BUILTIN_SCENARIOS["translation-1d"]

    def test_resolve_reads_files(self, tmp_path):
        p = tmp_path / "demo.scenario"
        p.write_text(GOOD)
        sc = resolve_scenario(str(p))
        assert sc.name == "demo"
        assert load_scenario(str(p)).psi_text == "2 * z1"

    def test_resolve_missing_raises(self):
        with pytest.raises(OSError):
            resolve_scenario("no-such-scenario")


class TestRunScenario:
    def test_identity_report_shape(self):
        rep = run_scenario(
            resolve_scenario("identity-pair"), probe_family_size=2, psumming_sizes=(1,)
        )
        assert rep["scenario"]["name"] == "identity-pair"
        assert rep["boundedness"]["verdict"] == "BOUNDED_EVIDENCE"
        assert rep["compactness"]["verdict"] == "COMPACT_EVIDENCE"
        assert rep["agreement"] == {"bounded": True, "compact": True}
        assert rep["exit_code"] == 0
        assert "version" in rep and "seed" in rep
        assert rep["operator_norm_probe"]["value"] == 0.0
        assert all(row["value"] == 0.0 for row in rep["lower_bounds"])

    def test_rejects_non_self_map(self):
        sc = parse_scenario_text(GOOD.replace("psi = 2*z1", "psi = z1 - 2*i"))
        with pytest.raises(ValueError, match="not a self-map"):
            run_scenario(sc)

    def test_inconclusive_exit_code(self):
        rep = run_scenario(
            parse_scenario_text(INCONCLUSIVE_TEXT),
            probe_family_size=2,
            psumming_sizes=(1,),
        )
        assert rep["boundedness"]["verdict"] == "INCONCLUSIVE"
        assert rep["exit_code"] == 2


class TestRendering:
    def test_json_round_trips_and_is_stable(self):
        sc = resolve_scenario("translation-1d")
        a = render_json(run_scenario(sc, probe_family_size=2, psumming_sizes=(1,)))
        b = render_json(run_scenario(sc, probe_family_size=2, psumming_sizes=(1,)))
        strip = lambda t: re.sub(r'"wall_ms": [0-9.]+', '"wall_ms": 0', t)
        assert strip(a) == strip(b)
        parsed = json.loads(a)
        assert parsed["scenario"]["psi"] == "z1 + i"

    def test_floats_render_with_full_precision(self):
        rep = run_scenario(
            resolve_scenario("translation-1d"), probe_family_size=2, psumming_sizes=(1,)
        )
        txt = render_json(rep)
        sup = rep["boundedness"]["sup_estimate"]
        assert ("%.17g" % sup) in txt

    def test_csv_layout(self):
        rep = run_scenario(
            resolve_scenario("identity-pair"), probe_family_size=2, psumming_sizes=(1,)
        )
        lines = render_csv(rep).splitlines()
        assert lines[0] == "key,value"
        assert "scenario.name,identity-pair" in lines
        assert any(ln.startswith("boundedness.verdict,") for ln in lines)

    def test_write_report_csv_and_json(self, tmp_path):
        rep = run_scenario(
            resolve_scenario("identity-pair"), probe_family_size=2, psumming_sizes=(1,)
        )
        jpath = tmp_path / "out.json"
        cpath = tmp_path / "out.csv"
        write_report(rep, str(jpath))
        write_report(rep, str(cpath), fmt="csv")
        assert json.loads(jpath.read_text())["exit_code"] == 0
        assert cpath.read_text().startswith("key,value")


class TestCli:
    def test_scenarios_list(self, capsys):
        assert main(["scenarios-list"]) == 0
        out = capsys.readouterr().out
        for name in BUILTIN_SCENARIOS:
            assert name in out

    def test_check_writes_report_and_figures(self, tmp_path, capsys):
        out = tmp_path / "translation.json"
        code = main(["check", "translation-1d", "--out", str(out)])
        assert code == 0
        assert out.exists()
        pngs = sorted(p.name for p in tmp_path.glob("*.png"))
        assert pngs == [
            "translation_boundedness.png",
            "translation_compactness.png",
            "translation_probes.png",
        ]
        summary = capsys.readouterr().out
        assert "BOUNDED_EVIDENCE" in summary

    def test_check_no_plots(self, tmp_path):
        out = tmp_path / "r.json"
        assert main(["check", "identity-pair", "--out", str(out), "--no-plots"]) == 0
        assert out.exists()
        assert list(tmp_path.glob("*.png")) == []

    def test_check_csv_format(self, tmp_path):
        out = tmp_path / "r.csv"
        assert main(["check", "identity-pair", "--out", str(out), "--format", "csv", "--no-plots"]) == 0
        assert out.read_text().startswith("key,value")

    def test_check_without_out_prints_report(self, capsys):
        assert main(["check", "identity-pair", "--no-plots"]) == 0
        out = capsys.readouterr().out
        assert '"exit_code": 0' in out

    def test_unknown_scenario_exits_one(self, capsys):
        assert main(["check", "definitely-not-here"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_scenario_file_with_bad_syntax_exits_one(self, tmp_path, capsys):
        p = tmp_path / "broken.scenario"
        p.write_text("name = broken\nwhat = ever\n")
        assert main(["check", str(p)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_inconclusive_scenario_exits_two(self, tmp_path):
        p = tmp_path / "climbing.scenario"
        p.write_text(INCONCLUSIVE_TEXT)
        assert main(["check", str(p), "--no-plots"]) == 2

    def test_bad_usage_exits_one(self, capsys):
        assert main([]) == 1
        assert main(["frobnicate"]) == 1
        capsys.readouterr()

    def test_check_flags_override_config(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code = main(
            ["check", "identity-pair", "--seed", "5", "--starts", "8", "--out", str(out), "--no-plots"]
        )
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["seed"] == 5
        assert rep["config"]["starts"] == 8

    def test_verify_lemmas_passes(self, capsys):
        assert main(["verify-lemmas", "--samples", "300", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        for name in ("ineq-im-ratio", "bump-peak", "split-bound"):
            assert name in out
        assert "FAIL" not in out
