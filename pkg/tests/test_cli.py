import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qcsense.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from qcsense.sensing import SensingMatrix

SMALL = ["--pairs", "2", "--trials", "8", "--seed", "3"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestExitCodes:
    def test_unknown_flag(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["train", "--bogus", "--out", str(tmp_path)])
        assert info.value.code == EXIT_CONFIG

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == EXIT_CONFIG

    @pytest.mark.parametrize("args", [
        ["--sigma", "-1"],
        ["--midpoint", "fixed:2"],
        ["--matrix-class", "binary_dense", "--protocol", "pixel"],
        ["--m", "7"],
        ["--machine", "trained:5"],
    ])
    def test_invalid_values(self, tmp_path, args):
        assert main(["experiment", "--out", str(tmp_path), *args]) == EXIT_CONFIG

    def test_bad_protocol_name(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["experiment", "--protocol", "magic", "--out", str(tmp_path)])
        assert info.value.code == EXIT_CONFIG

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"num_pairs": 2, "colour": "blue"}))
        assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG

    def test_multiple_m_for_single_pair_command(self, tmp_path):
        assert main(["sense", "--m", "1,2", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_missing_input_is_runtime(self, tmp_path):
        assert main(["report", "--input", str(tmp_path / "nothing"), "--out", str(tmp_path)]) == EXIT_RUNTIME

    def test_rank_deficient_projection_is_runtime(self, tmp_path):
        src = tmp_path / "in"
        src.mkdir()
        SensingMatrix(np.array([[1, 1, 0, 0, 0, 0], [1, 1, 0, 0, 0, 0.0]]), "binary_dense").save(src / "matrix.csv")
        (src / "signal.json").write_text(json.dumps({"pair_id": 0, "y": [0.5] * 6}))
        code = main(["project", "--protocol", "decomposition", "--input", str(src), "--out", str(tmp_path / "o")])
        assert code == EXIT_RUNTIME

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "qcsense", "train", "--sigma", "0", "--out", str(tmp_path)],
                              capture_output=True, text=True)
        assert proc.returncode == EXIT_CONFIG and "config error" in proc.stderr


class TestCommands:
    def test_train(self, tmp_path):
        assert main(["train", "--out", str(tmp_path)]) == EXIT_OK
        rows = read_csv(tmp_path / "machine.csv")
        assert len(rows) == 64 and rows[3]["bits"] == "110000"
        assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-12)
        info = json.loads((tmp_path / "machine.json").read_text())
        assert info["training_size"] == 2 and 0.5 <= info["circuit_success_probability"] <= 1

    def test_train_optimal_midpoint(self, tmp_path):
        assert main(["train", "--midpoint", "optimal", "--machine", "trained:0", "--out", str(tmp_path)]) == EXIT_OK
        info = json.loads((tmp_path / "machine.json").read_text())
        assert info["training_size"] == 16 and 0 < info["midpoint"] < 1

    def test_sense_then_project_and_sample(self, tmp_path):
        sensed = tmp_path / "s"
        assert main(["sense", "--m", "3", "--pair", "1", *SMALL, "--out", str(sensed)]) == EXIT_OK
        A = SensingMatrix.load(sensed / "matrix.csv")
        meta = json.loads((sensed / "signal.json").read_text())
        assert A.m == 3 and np.allclose(A.entries @ meta["y"], meta["x"])

        proj = tmp_path / "p"
        args = ["--protocol", "decomposition,rodeo,qite", "--input", str(sensed), "--out", str(proj)]
        assert main(["project", *args]) == EXIT_OK
        for protocol in ("decomposition", "rodeo", "qite"):
            rows = read_csv(proj / f"projected_{protocol}.csv")
            assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-12)

        samp = tmp_path / "t"
        assert main(["sample", "--protocol", "qite", "--trials", "5", "--input", str(sensed),
                     "--out", str(samp)]) == EXIT_OK
        rows = read_csv(samp / "trials.csv")
        assert len(rows) == 5 and {r["pair_id"] for r in rows} == {"1"} and {r["m"] for r in rows} == {"3"}

    def test_sample_regenerates_same_pair(self, tmp_path):
        base = ["sample", "--protocol", "decomposition", "--m", "2", "--pair", "0", *SMALL]
        assert main([*base, "--out", str(tmp_path / "a")]) == EXIT_OK
        assert main([*base, "--out", str(tmp_path / "b")]) == EXIT_OK
        assert (tmp_path / "a" / "trials.csv").read_bytes() == (tmp_path / "b" / "trials.csv").read_bytes()

    def test_experiment_and_report(self, tmp_path):
        out = tmp_path / "e"
        args = ["experiment", "--protocol", "decomposition,qite", "--m", "0-2", *SMALL,
                "--attempt-cap", "2", "--no-plots", "--out", str(out)]
        assert main(args) == EXIT_OK
        cfg = json.loads((out / "config.json").read_text())
        assert cfg["m_values"] == [0, 1, 2] and cfg["attempt_cap"] == 2 and cfg["master_seed"] == 3
        assert len(read_csv(out / "trials.csv")) == 2 * 3 * 2 * 8
        rebuilt = tmp_path / "r"
        assert main(["report", "--input", str(out), "--out", str(rebuilt), "--no-plots"]) == EXIT_OK
        for name in ("trials.csv", "summary.csv", "entropy.csv"):
            assert (out / name).read_bytes() == (rebuilt / name).read_bytes()

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"num_pairs": 1, "trials_per_pair": 3, "m_values": [1]}))
        out = tmp_path / "e"
        assert main(["experiment", "--config", str(cfg), "--trials", "2", "--no-plots", "--out", str(out)]) == EXIT_OK
        cfg_out = json.loads((out / "config.json").read_text())
        assert cfg_out["trials_per_pair"] == 2 and cfg_out["num_pairs"] == 1

    def test_workers_flag(self, tmp_path):
        args = ["experiment", "--m", "1,2", *SMALL, "--no-plots"]
        assert main([*args, "--out", str(tmp_path / "a")]) == EXIT_OK
        assert main([*args, "--workers", "2", "--out", str(tmp_path / "b")]) == EXIT_OK
        for name in ("trials.csv", "summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        assert main([*args, "--workers", "0", "--out", str(tmp_path / "c")]) == EXIT_CONFIG
