"""CLI surface tests: subcommands, exit codes, manifests, determinism."""

import json

import pytest

from kronlow.cli import main
from kronlow.discrepancy import star_discrepancy_exact
from kronlow.pointset import load_csv

SINGLE_POINT_CSV = "d=2,n=1\n0.5,0.5\n"


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestEval:
    def test_single_point_value(self, tmp_path, capsys):
        path = tmp_path / "p.csv"
        path.write_text(SINGLE_POINT_CSV)
        code, out, _ = run(capsys, ["eval", "--in", str(path)])
        assert code == 0
        payload = json.loads(out)
        assert payload["value"] == 0.75
        assert payload["witness"] == [0.5, 0.5]
        assert payload["side"] == "closed"
        assert (payload["n"], payload["d"]) == (1, 2)
        assert payload["millis"] >= 0.0

    def test_oracle_flag_agrees(self, tmp_path, capsys):
        path = tmp_path / "p.csv"
        path.write_text(SINGLE_POINT_CSV)
        _, out_exact, _ = run(capsys, ["eval", "--in", str(path)])
        _, out_oracle, _ = run(capsys, ["eval", "--in", str(path), "--oracle"])
        a, b = json.loads(out_exact), json.loads(out_oracle)
        assert a["value"] == b["value"] and a["witness"] == b["witness"]

    def test_malformed_input_exits_1(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("d=2,n=1\n0.5\n")
        code, _, err = run(capsys, ["eval", "--in", str(path)])
        assert code == 1
        assert "line 2" in err

    def test_threads_do_not_change_result(self, tmp_path, capsys):
        path = tmp_path / "p.csv"
        path.write_text(SINGLE_POINT_CSV)
        results = []
        for k in ("1", "2"):
            _, out, _ = run(capsys, ["--threads", k, "eval", "--in", str(path)])
            payload = json.loads(out)
            payload.pop("millis")
            results.append(payload)
        assert results[0] == results[1]


class TestGenerate:
    def test_pipeline_matches_library(self, tmp_path, capsys):
        out_csv = tmp_path / "set.csv"
        code, _, _ = run(capsys, [
            "generate", "--family", "kronecker", "--n", "100", "--d", "3",
            "--params", "0.71810558,0.81422429", "--shifted", "--out", str(out_csv),
        ])
        assert code == 0
        ps = load_csv(out_csv)
        code, out, _ = run(capsys, ["eval", "--in", str(out_csv)])
        payload = json.loads(out)
        assert payload["value"] == star_discrepancy_exact(ps).value

    def test_stdout_output(self, capsys):
        code, out, _ = run(capsys, ["generate", "--family", "fibonacci", "--n", "3", "--out", "-"])
        assert code == 0
        assert out.startswith("d=2,n=3\n")

    def test_sobol_family(self, tmp_path, capsys):
        out_csv = tmp_path / "sob.csv"
        code, _, _ = run(capsys, ["generate", "--family", "sobol", "--n", "8", "--d", "4",
                                  "--out", str(out_csv)])
        assert code == 0
        assert load_csv(out_csv).n == 8

    def test_inconsistent_d_exits_1(self, tmp_path, capsys):
        code, _, err = run(capsys, [
            "generate", "--family", "kronecker", "--n", "10", "--d", "4",
            "--params", "0.5", "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 1
        assert "inconsistent" in err

    def test_byte_identical_reruns(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            run(capsys, ["generate", "--family", "kronecker", "--n", "20", "--d", "3",
                         "--params", "0.3,0.7", "--shifted", "--out", str(p)])
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_manifest_written(self, tmp_path, capsys):
        out_csv = tmp_path / "m.csv"
        run(capsys, ["generate", "--family", "fibonacci", "--n", "4", "--out", str(out_csv)])
        manifest = json.loads((tmp_path / "m.csv.manifest.json").read_text())
        assert manifest["subcommand"] == "generate"
        assert manifest["outputs"] == [str(out_csv)]
        assert manifest["version"]
        assert manifest["wall_ms"] >= 0.0


class TestOptimizeCli:
    def test_seed_required_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["optimize", "--n", "10", "--d", "2", "--budget", "50"])
        assert exc.value.code == 2

    def test_unknown_flag_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["eval", "--input", "x.csv"])
        assert exc.value.code == 2

    def test_byte_identical_seeded_reruns(self, tmp_path, capsys):
        args = ["optimize", "--n", "10", "--d", "2", "--budget", "60",
                "--runs", "1", "--seed", "3"]
        outs = []
        for name in ("r1.json", "r2.json"):
            path = tmp_path / name
            code, _, _ = run(capsys, args + ["--out", str(path)])
            assert code == 0
            outs.append(path.read_text())
        # the primary payloads are identical apart from the manifest self-path
        a, b = (json.loads(t) for t in outs)
        a.pop("manifest"), b.pop("manifest")
        assert a == b
        m1 = json.loads((tmp_path / "r1.json.manifest.json").read_text())
        assert m1["seed"] == 3

    def test_result_fields(self, capsys):
        code, out, _ = run(capsys, ["optimize", "--n", "8", "--d", "2", "--budget", "30",
                                    "--runs", "1", "--seed", "0", "--out", "-"])
        assert code == 0
        payload = json.loads(out)
        assert set(payload) >= {"best_params", "best_value", "history", "evals_used", "seed"}
        assert payload["history"] == sorted(payload["history"], reverse=True)


class TestTuneCli:
    def test_missing_args_usage_error(self, capsys):
        code, _, err = run(capsys, ["tune", "--seed", "1"])
        assert code == 2
        assert "missing" in err

    def test_missing_seed_usage_error(self, capsys):
        code, _, err = run(capsys, ["tune", "--n-lo", "5", "--n-hi", "16", "--budget", "60"])
        assert code == 2
        assert "--seed" in err

    def test_scenario_file(self, tmp_path, capsys):
        scenario = {"n_lo": 5, "n_hi": 20, "budget_pairs": 60, "seed": 9, "instances": 3}
        sc_path = tmp_path / "scenario.json"
        sc_path.write_text(json.dumps(scenario))
        out_path = tmp_path / "tuned.json"
        code, _, _ = run(capsys, ["tune", "--scenario", str(sc_path), "--out", str(out_path)])
        assert code == 0
        tuned = json.loads(out_path.read_text())
        assert len(tuned["params"]) == 2
        assert tuned["evals_used"] <= 60
        assert tuned["scenario"]["seed"] == 9

    def test_byte_identical_seeded_reruns(self, tmp_path, capsys):
        args = ["tune", "--n-lo", "5", "--n-hi", "16", "--budget", "60", "--seed", "2"]
        texts = []
        for name in ("t1.json", "t2.json"):
            path = tmp_path / name
            code, _, _ = run(capsys, args + ["--out", str(path)])
            assert code == 0
            texts.append(json.loads(path.read_text()))
        for t in texts:
            t.pop("manifest")
        assert texts[0] == texts[1]


class TestBenchCli:
    def test_table1_outputs(self, tmp_path, capsys):
        stem = tmp_path / "report"
        code, _, _ = run(capsys, ["bench", "table1", "--columns", "i_200", "--ns", "20,25",
                                  "--plot", "--out", str(stem)])
        assert code == 0
        assert (tmp_path / "report.csv").exists()
        assert (tmp_path / "report.png").exists()
        payload = json.loads((tmp_path / "report.json").read_text())
        assert payload["columns"] == ["i_200"]
        manifest = json.loads((tmp_path / "report.manifest.json").read_text())
        assert len(manifest["outputs"]) == 3

    def test_heatmap_outputs_with_plot(self, tmp_path, capsys):
        stem = tmp_path / "heat"
        code, _, _ = run(capsys, ["bench", "heatmap", "--n", "16", "--res", "2",
                                  "--thresholds", "0.5", "--plot", "--out", str(stem)])
        assert code == 0
        csv_lines = (tmp_path / "heat.csv").read_text().splitlines()
        assert len(csv_lines) == 5  # header + 2x2 cells
        assert (tmp_path / "heat.png").exists()
        manifest = json.loads((tmp_path / "heat.manifest.json").read_text())
        assert str(tmp_path / "heat.png") in manifest["outputs"]

    def test_inverse_stdout(self, capsys):
        code, out, _ = run(capsys, ["bench", "inverse", "--targets", "0.01,1e-9", "--out", "-"])
        assert code == 0
        assert out.splitlines()[0] == "method,target,min_n"
        assert "unreached" in out

    def test_inverse_outputs(self, tmp_path, capsys):
        stem = tmp_path / "inv"
        code, _, _ = run(capsys, ["bench", "inverse", "--targets", "0.01", "--table", "table1",
                                  "--plot", "--out", str(stem)])
        assert code == 0
        payload = json.loads((tmp_path / "inv.json").read_text())
        assert payload["result"]["cmaes"]["0.01"] == 750
        assert (tmp_path / "inv.png").exists()
