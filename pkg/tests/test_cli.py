"""Command-line behavior: output formats, exit codes, overrides."""

import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from latticeplan.cli import main

BUNDLED = str(Path(__file__).resolve().parent.parent
              / "scenarios" / "walkthrough.yaml")

FACTS_LINES = [
    "fact {} name=0 marks=0,Op",
    "fact {e} name=I marks=I,Op",
    "fact {u} name=u marks=-",
    "fact {v} name=v marks=-",
    "fact {e,u} name=B1 marks=-",
    "fact {e,v} name=B2 marks=-",
    "fact {u,v} name=B3 marks=bot,Cl",
    "fact {e,u,v,w} name=1 marks=1,Cl",
]

PLAN_LINES = [
    "discovered=b1,b2",
    "chosen=b1,b2",
    "priority=1",
    "tie=0",
    "assign=b1->agent-1,b2->agent-2",
    "free=agent-3",
    "play agent-1=(2,4)->(2,3)->(2,2)",
    "play agent-2=(4,3)->(4,2)->(4,1)",
    "play agent-3=(6,3)->(6,2)->(6,1)",
    "alternates=1020",
    "reward=detail,outline,profile,scout:0,0,scout:0,1",
]


def run_main(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_mutated(tmp_path, mutate):
    with open(BUNDLED, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    mutate(doc)
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(doc), encoding="utf-8")
    return str(path)


class TestValidateCommand:
    def test_bundled_scenario_all_pass(self, capsys):
        code, out, err = run_main(capsys, "validate", "--scenario", BUNDLED)
        assert code == 0 and err == ""
        lines = out.splitlines()
        assert lines == [
            "phase-monoid: PASS",
            "op-cl-classes: PASS",
            "system-lattice: PASS",
            "desire-lattice agent-1: PASS",
            "desire-lattice agent-2: PASS",
            "desire-lattice agent-3: PASS",
            "environment: PASS",
            "cross-references: PASS",
            "planner-config: PASS",
        ]

    def test_broken_scenario_exits_1(self, capsys, tmp_path):
        def mutate(doc):
            doc["environment"]["agents"][0]["position"] = [0, 2]
        path = write_mutated(tmp_path, mutate)
        code, out, _ = run_main(capsys, "validate", "--scenario", path)
        assert code == 1
        lines = out.splitlines()
        assert any(line.startswith("environment: FAIL (") for line in lines)
        assert "cross-references: FAIL" \
            " (skipped: depends on a failed check)" in lines

    def test_missing_file_exits_2(self, capsys, tmp_path):
        code, _, err = run_main(
            capsys, "validate", "--scenario", str(tmp_path / "absent.yaml"))
        assert code == 2
        assert err.startswith("parse error: cannot read scenario")

    def test_invalid_yaml_exits_2(self, capsys, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("phase: [unclosed\n", encoding="utf-8")
        code, _, err = run_main(capsys, "validate", "--scenario", str(path))
        assert code == 2
        assert err.startswith("parse error:")


class TestFactsCommand:
    def test_bundled_facts_table(self, capsys):
        code, out, _ = run_main(capsys, "facts", "--scenario", BUNDLED)
        assert code == 0
        assert out.splitlines() == FACTS_LINES


class TestWeightsCommand:
    def test_bundled_weight_tables(self, capsys):
        code, out, _ = run_main(capsys, "weights", "--scenario", BUNDLED)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "agent agent-1 desires=b1,b2 intention=U12"
        block2 = lines.index("agent agent-2 desires=b1,b2 intention=U12")
        block3 = lines.index(
            "agent agent-3 desires=b1,b2,b3 intention=U123")
        agent2 = lines[block2 + 1:block3]
        agent3 = lines[block3 + 1:]
        assert agent2 == ["  U123 1/1", "  U12 1/1", "  b1 1/2",
                          "  b2 1/2", "  0 0/1", "  b3 0/1"]
        assert agent3 == ["  U123 1/1", "  U12 2/3", "  b1 1/3",
                          "  b2 1/3", "  b3 1/3", "  0 0/1"]


class TestPlanCommand:
    def test_bundled_first_decision(self, capsys):
        code, out, _ = run_main(capsys, "plan", "--scenario", BUNDLED)
        assert code == 0
        assert out.splitlines() == PLAN_LINES

    def test_depth_override(self, capsys):
        code, out, _ = run_main(
            capsys, "plan", "--scenario", BUNDLED, "--depth", "1")
        assert code == 0
        lines = out.splitlines()
        assert "play agent-1=(2,4)->(2,3)" in lines
        assert "play agent-2=(4,3)->(4,2)" in lines
        assert "alternates=40" in lines
        assert "reward=detail,outline,profile" in lines

    def test_depth_override_beyond_exact_bound_exits_3(self, capsys):
        code, _, err = run_main(
            capsys, "plan", "--scenario", BUNDLED, "--depth", "9")
        assert code == 3
        assert err.startswith("limit exceeded:")

    def test_eq1_mode_override(self, capsys):
        code, out, _ = run_main(capsys, "plan", "--scenario", BUNDLED,
                                "--eq1-mode", "positionwise")
        assert code == 0
        assert out.splitlines()[0] == "discovered=b1,b2"


class TestSimulateCommand:
    def test_bundled_run_reaches_all_goals(self, capsys):
        code, out, _ = run_main(capsys, "simulate", "--scenario", BUNDLED)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("step=0 pos=agent-1:(2,4),")
        assert lines[-1].startswith("end reason=all goals achieved steps=12")
        assert "assign=b1->agent-1,b2->agent-2" in lines[0]

    def test_max_steps_override(self, capsys):
        code, out, _ = run_main(capsys, "simulate", "--scenario", BUNDLED,
                                "--max-steps", "1")
        assert code == 0
        assert out.splitlines()[-1] == (
            "end reason=step limit 1 steps=1"
            " pos=agent-1:(2,3),agent-2:(4,2),agent-3:(6,2)")

    def test_byte_determinism_across_processes(self):
        def run(seed):
            return subprocess.run(
                [sys.executable, "-m", "latticeplan.cli", "simulate",
                 "--scenario", BUNDLED],
                capture_output=True, env={"PYTHONHASHSEED": seed,
                                          "PATH": "/usr/bin:/bin"})
        first, second = run("101"), run("202")
        assert first.returncode == 0 and second.returncode == 0
        assert first.stdout == second.stdout


class TestDotCommand:
    def test_system_lattice(self, capsys):
        code, out, _ = run_main(
            capsys, "dot", "system-lattice", "--scenario", BUNDLED)
        assert code == 0
        assert out.startswith('digraph "system-lattice" {')
        for name in ("0", "I", "u", "v", "B1", "B2", "B3", "1"):
            assert f'"{name}"' in out

    def test_desire_lattice(self, capsys):
        code, out, _ = run_main(
            capsys, "dot", "desire-lattice:agent-3", "--scenario", BUNDLED)
        assert code == 0
        assert out.startswith('digraph "desire-lattice-agent-3" {')
        assert '"U123" [label="U123\\n(top)"]' in out

    def test_agent_game_payoffs_sorted(self, capsys):
        code, out, _ = run_main(
            capsys, "dot", "agent-game:agent-1:1", "--scenario", BUNDLED)
        assert code == 0
        assert out.startswith("digraph agent-game-agent-1-1 {")
        assert "{detail,outline,profile}" in out
        assert "frozenset" not in out

    def test_unknown_target_exits_1(self, capsys):
        code, _, err = run_main(
            capsys, "dot", "nonsense", "--scenario", BUNDLED)
        assert code == 1
        assert err.startswith("error: unknown target 'nonsense'")

    def test_unknown_agent_exits_1(self, capsys):
        code, _, err = run_main(
            capsys, "dot", "desire-lattice:nobody", "--scenario", BUNDLED)
        assert code == 1
        assert "no desire lattice for agent 'nobody'" in err

    def test_bad_game_depth_exits_1(self, capsys):
        code, _, err = run_main(
            capsys, "dot", "agent-game:agent-1:deep", "--scenario", BUNDLED)
        assert code == 1
        assert "bad game depth 'deep'" in err


class TestConsoleScript:
    def test_entry_point_matches_module(self, capsys):
        result = subprocess.run(
            ["latticeplan", "facts", "--scenario", BUNDLED],
            capture_output=True, text=True)
        assert result.returncode == 0
        assert result.stdout.splitlines() == FACTS_LINES
