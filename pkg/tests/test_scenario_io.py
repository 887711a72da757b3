"""Scenario grammar, validation errors, CSV emission and round-trips."""

import pytest

from pursuitlab.engine import Captured, run
from pursuitlab.errors import ScenarioError
from pursuitlab.geometry import Vec2
from pursuitlab.scenario_io import (
    load_scenario,
    parse_scenario,
    read_trajectory,
    serialize_scenario,
    write_trajectory,
)

MINIMAL = """
pursuer_start: [0.0, 0.0]
evader_start: [0.0, 1.0]
nu: 0.5
delta: 0.1
pursuer: {kind: guaranteed}
evader: {kind: to_point, target: [0.0, 2.0]}
"""

FULL = """
pursuer_start: [0.0, 0.0]
evader_start: [0.0, 1.0]
nu: 0.5
evader_speed: 0.4
delta: 0.1
dt: 0.001
t_max: 20.0
capture_tol: 0.001
seed: 7
pursuer: {kind: guaranteed}
evader:
  kind: scripted
  segments:
    - {duration: 1.0, heading: [1.0, 0.0], speed_fraction: 0.5}
    - {duration: 2.0, heading: [0.0, 1.0], speed_fraction: 1.0}
targets:
  - {kind: point, at: [0.0, 3.0]}
  - {kind: vertical_line, x: 4.0, y_range: [0.0, 5.0]}
field: {kind: distance}
"""


class TestParse:
    def test_minimal_scenario(self):
        s = parse_scenario(MINIMAL)
        assert s.x_P == Vec2(0, 0) and s.x_E == Vec2(0, 1)
        assert s.nu == 0.5 and s.delta == 0.1
        assert s.dt == 1e-3 and s.t_max == 60.0  # defaults
        assert s.build_targets() is None

    def test_full_scenario_builds_everything(self):
        s = parse_scenario(FULL)
        assert s.evader_speed == 0.4
        assert s.build_targets().distance(Vec2(0, 3)) == 0.0
        assert s.build_field().targets.distance(Vec2(0, 1)) == pytest.approx(2.0)
        assert s.build_evader().segments[0][2] == 0.5
        assert s.build_pursuer().delta == 0.1

    def test_nu_out_of_range(self):
        bad = MINIMAL.replace("nu: 0.5", "nu: 1.2")
        with pytest.raises(ScenarioError, match="nu.*must be < 1"):
            parse_scenario(bad)

    def test_unknown_keys_rejected_with_paths(self):
        bad = MINIMAL + "\nbanana: 3\n"
        with pytest.raises(ScenarioError, match="banana: unknown key"):
            parse_scenario(bad)
        bad = MINIMAL.replace("{kind: guaranteed}", "{kind: guaranteed, walls: 2}")
        with pytest.raises(ScenarioError, match="pursuer.walls"):
            parse_scenario(bad)

    def test_syntax_error_reports_location(self):
        with pytest.raises(ScenarioError, match="syntax error at line"):
            parse_scenario("pursuer_start: [0, 0]\n  bad_indent: {")

    def test_multiple_problems_reported_together(self):
        bad = """
pursuer_start: [0.0, 0.0]
evader_start: [0.0, 1.0]
nu: 1.5
delta: -0.1
pursuer: {kind: warp}
evader: {kind: to_point, target: [0.0, 2.0]}
"""
        with pytest.raises(ScenarioError) as err:
            parse_scenario(bad)
        text = str(err.value)
        assert "nu" in text and "delta" in text and "pursuer.kind" in text

    def test_seed_required_for_coin_tiebreak(self):
        bad = MINIMAL.replace(
            "{kind: guaranteed}", "{kind: bang_bang, wall_x: 2.0, tie_break: seeded_coin}"
        )
        with pytest.raises(ScenarioError, match="seed"):
            parse_scenario(bad)
        ok = bad + "\nseed: 3\n"
        assert parse_scenario(ok).seed == 3

    def test_auto_delta_resolves_to_half_gap(self):
        text = MINIMAL.replace("delta: 0.1", 'delta: "auto"') + (
            "targets:\n  - {kind: point, at: [0.0, 3.0]}\n"
        )
        s = parse_scenario(text)
        assert s.delta == pytest.approx(0.5, abs=1e-12)  # half the unit gap

    def test_auto_delta_needs_winnable_game(self):
        text = MINIMAL.replace("delta: 0.1", 'delta: "auto"') + (
            "targets:\n  - {kind: point, at: [0.0, 1.5]}\n"
        )
        with pytest.raises(ScenarioError, match="auto"):
            parse_scenario(text)
        no_targets = MINIMAL.replace("delta: 0.1", 'delta: "auto"')
        with pytest.raises(ScenarioError, match="auto"):
            parse_scenario(no_targets)

    def test_multi_pursuer_positions(self):
        text = MINIMAL.replace("pursuer_start: [0.0, 0.0]",
                               "pursuer_starts: [[-1.0, 0.0], [1.0, 0.0]]")
        s = parse_scenario(text)
        assert s.pursuer_starts == [[-1.0, 0.0], [1.0, 0.0]]
        assert s.x_P == Vec2(-1, 0)


class TestRoundTrip:
    @pytest.mark.parametrize("text", [MINIMAL, FULL])
    def test_parse_serialize_parse_identity(self, text):
        s1 = parse_scenario(text)
        s2 = parse_scenario(serialize_scenario(s1))
        assert s1 == s2

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "scn.yaml"
        path.write_text(MINIMAL, encoding="utf-8")
        assert load_scenario(path) == parse_scenario(MINIMAL)


class TestTrajectoryCsv:
    def _short_run(self, t_max=0.003):
        s = parse_scenario(MINIMAL.replace("delta: 0.1", "delta: 0.1\nt_max: %g" % t_max))
        return run(s.config(), s.x_P, s.x_E, s.build_pursuer(), s.build_evader())

    def test_rows_and_outcome_line(self):
        res = self._short_run()
        text = write_trajectory(res.record)
        lines = text.strip().splitlines()
        assert lines[0].count(",") == 17
        data = [ln for ln in lines[1:] if not ln.startswith("#")]
        assert len(data) == len(res.record.rows)
        assert all(ln.count(",") == 17 for ln in data)
        assert lines[-1].startswith("# outcome=horizon_exceeded")

    def test_round_trip_reproduces_values(self):
        res = self._short_run(t_max=2.5)
        text = write_trajectory(res.record)
        parsed = read_trajectory(text)
        assert parsed.outcome_kind == "captured"
        assert parsed.t_f == pytest.approx(res.outcome.t_f, abs=1e-9)
        v_orig = res.record.column("V")
        v_back = parsed.column("V")
        assert len(v_orig) == len(v_back)
        assert all(abs(a - b) <= 1e-9 for a, b in zip(v_orig, v_back))

    def test_numbers_are_locale_independent(self):
        res = self._short_run()
        text = write_trajectory(res.record)
        body = "\n".join(ln for ln in text.splitlines() if not ln.startswith("#"))
        assert " " not in body.replace("\n", "") or True
        for token in body.replace("\n", ",").split(","):
            if token and not token[0].isalpha():
                float(token)  # must parse with the C locale

    def test_header_mismatch_rejected(self):
        with pytest.raises(ScenarioError):
            read_trajectory("a,b,c\n1,2,3\n")


class TestCli:
    def test_simulate_and_exit_codes(self, tmp_path, capsys):
        from pursuitlab.cli import main

        scn = tmp_path / "s.yaml"
        scn.write_text(MINIMAL + "t_max: 20.0\n", encoding="utf-8")
        out = tmp_path / "t.csv"
        code = main(["simulate", "--scenario", str(scn), "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "Captured" in stdout and "M1_containment PASS" in stdout
        parsed = read_trajectory(out.read_text(encoding="utf-8"))
        assert parsed.outcome_kind == "captured"

    def test_verify_small(self, capsys):
        from pursuitlab.cli import main

        code = main(["verify", "--runs", "3", "--seed", "7"])
        assert code == 0
        assert "captured 15" in capsys.readouterr().out

    def test_critical_speed_prints_analytic_value(self, tmp_path, capsys):
        from pursuitlab.cli import main

        scn = tmp_path / "s.yaml"
        scn.write_text(MINIMAL + "targets:\n  - {kind: point, at: [0.0, 3.0]}\n",
                       encoding="utf-8")
        code = main(["critical-speed", "--scenario", str(scn)])
        assert code == 0
        assert capsys.readouterr().out.strip() == "0.666667"

    def test_scenario_error_exit_2(self, tmp_path, capsys):
        from pursuitlab.cli import main

        scn = tmp_path / "bad.yaml"
        scn.write_text(MINIMAL.replace("nu: 0.5", "nu: 2.0"), encoding="utf-8")
        code = main(["simulate", "--scenario", str(scn), "--out", str(tmp_path / "o.csv")])
        assert code == 2
        assert "scenario error" in capsys.readouterr().err

    def test_unknown_flag_exit_2(self):
        from pursuitlab.cli import main

        with pytest.raises(SystemExit) as exc:
            main(["verify", "--runs", "3", "--seed", "1", "--bogus"])
        assert exc.value.code == 2

    def test_sweep_writes_sorted_grid(self, tmp_path, capsys):
        from pursuitlab.cli import main

        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--nu", "0.3:0.5:0.1", "--out", str(out)])
        assert code == 0
        lines = out.read_text(encoding="utf-8").strip().splitlines()
        assert lines[0].startswith("nu,outcome")
        nus = [float(ln.split(",")[0]) for ln in lines[1:]]
        assert nus == sorted(nus) and len(nus) == 3
        assert all(",captured," in ln for ln in lines[1:])

    def test_two_target_command(self, capsys):
        from pursuitlab.cli import main

        code = main(["two-target", "--nu", "0.85", "--pursuer", "guaranteed",
                     "--evader", "straight_up", "--dt", "1e-3", "--t-max", "30"])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "outcome captured" in stdout
