import subprocess
import sys

import pytest

from sparse_iht.cli import main
from sparse_iht.experiments import ExperimentRecord, read_records_csv, write_records_csv

FAST = ["--max-steps", "300", "--n-monte", "20"]
COMMANDS = ["train-dense", "train-sparse", "estimate-l2s", "sweep", "certify", "plot"]


@pytest.mark.parametrize("command", COMMANDS)
def test_help_lists_flags(command, capsys):
    with pytest.raises(SystemExit) as exc:
        main([command, "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "--out-dir" in out and "default" in out


@pytest.mark.parametrize("argv", [
    ["train-sparse", "--sparsity", "0"],
    ["train-sparse", "--sparsity", "15"],
    ["sweep", "--runs", "0"],
    ["certify"],
    ["train-sparse", "--max-steps", "abc"],
])
def test_usage_errors_exit_2(argv, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(argv + ["--out-dir", str(tmp_path / "o")])
    assert exc.value.code == 2
    assert not (tmp_path / "o").exists()


def test_train_sparse_showcase_and_certify(tmp_path, capsys):
    out = tmp_path / "o"
    argv = ["train-sparse", "--sparsity", "7", "--seed-init", "21", "--seed-data", "42",
            "--seed-support", "84", "--out-dir", str(out)]
    assert main(argv) == 0
    printed = capsys.readouterr().out
    assert "s: 7" in printed and "stable: True" in printed
    run = out / "sparse_s7_data42_init21_support84"
    files = {p.name: p.read_bytes() for p in run.iterdir()}
    assert set(files) == {"record.csv", "trace.csv", "params.csv"}

    assert main(argv) == 0
    assert {p.name: p.read_bytes() for p in run.iterdir()} == files

    capsys.readouterr()
    assert main(["certify", "--run-dir", str(run), "--dense-loss", "0.05", "--eps", "0.02"]) == 0
    report = capsys.readouterr().out
    assert "stable: True" in report and "eps_optimal: True" in report


def test_certify_eps_monotone(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["train-sparse", "--sparsity", "5", "--out-dir", str(out)] + FAST) == 0
    run = next(out.iterdir())
    verdicts = []
    for eps in ("1e-9", "0.02"):
        capsys.readouterr()
        assert main(["certify", "--run-dir", str(run), "--eps", eps, "--dense-loss", "0.05"]) == 0
        verdicts.append("eps_optimal: True" in capsys.readouterr().out)
    assert verdicts[0] <= verdicts[1]


def _certify_values(capsys, argv):
    capsys.readouterr()
    assert main(argv) == 0
    return dict(line.split(": ", 1) for line in capsys.readouterr().out.splitlines())


def test_truncated_run_is_far_from_stationary(tmp_path, capsys):
    # one step can already satisfy the stability inequality (it ignores the
    # on-support gradient), so compare on-support stationarity instead
    short, full = tmp_path / "short", tmp_path / "full"
    assert main(["train-sparse", "--sparsity", "7", "--max-steps", "1", "--out-dir", str(short)]) == 0
    assert main(["train-sparse", "--sparsity", "7", "--max-steps", "2000", "--out-dir", str(full)]) == 0
    # dense reference trained on the fly with the run's seeds
    a = _certify_values(capsys, ["certify", "--run-dir", str(next(short.iterdir())),
                                 "--max-steps", "300", "--n-monte", "20"])
    b = _certify_values(capsys, ["certify", "--run-dir", str(next(full.iterdir())), "--dense-loss", "0.05"])
    assert float(a["max_grad_on_support"]) > 10 * float(b["max_grad_on_support"])
    assert a["eps_optimal"] == "False"
    assert float(a["sparse_train_loss"]) > float(b["sparse_train_loss"])


def test_certify_missing_artifacts(tmp_path):
    assert main(["certify", "--run-dir", str(tmp_path / "nope")]) == 1


def test_train_dense_and_estimate(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["train-dense", "--out-dir", str(out)] + FAST) == 0
    assert (out / "dense_data42_init21" / "trace.csv").exists()
    capsys.readouterr()
    assert main(["estimate-l2s", "--sparsity", "15", "--out-dir", str(out), "--n-monte", "10"]) == 0
    printed = capsys.readouterr().out
    assert "l_hat:" in printed and "gamma:" in printed
    assert len((out / "l2s_s15_data42_init21.csv").read_text().splitlines()) == 11


def test_sweep_row_count_and_plots(tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--runs", "2", "--out-dir", str(out)] + FAST) == 0
    records = read_records_csv(out / "records.csv")
    assert sum(r.kind == "sparse" for r in records) == 28
    assert sum(r.kind == "dense" for r in records) == 2
    assert (out / "summary.csv").read_text().startswith("kind,s,n_runs,n_failed,")

    plots = tmp_path / "plots"
    assert main(["plot", "--records", str(out / "records.csv"), "--out-dir", str(plots)]) == 0
    svgs = sorted(p.name for p in plots.glob("*.svg"))
    assert len(svgs) == 6 and len(list(plots.glob("*.csv"))) == 6
    first = {p.name: p.read_bytes() for p in plots.iterdir()}
    assert main(["plot", "--records", str(out / "records.csv"), "--out-dir", str(plots)]) == 0
    assert {p.name: p.read_bytes() for p in plots.iterdir()} == first
    assert b"<svg" in first["parameters.svg"]


def test_sweep_subset_and_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("IHT_OUT_DIR", str(tmp_path / "env"))
    assert main(["sweep", "--runs", "1", "--sparsity", "3", "4"] + FAST) == 0
    records = read_records_csv(tmp_path / "env" / "records.csv")
    assert sorted({r.s for r in records}) == [3, 4, 15]


def test_sweep_unwritable_out_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["sweep", "--runs", "1", "--sparsity", "3", "--out-dir", str(blocker / "sub")] + FAST) == 1


def test_plot_single_run_and_empty(tmp_path):
    rec = ExperimentRecord("sparse", 4, 1, 2, 3, gamma=1.0, l_hat=1.0, train_loss=0.1, test_loss=0.2,
                           train_acc=0.9, test_acc=0.8, steps_taken=5, stop_reason="max_steps",
                           stable=True, support=(0,), theta=(1.0,) + (0.0,) * 14, grad=(0.0,) * 15)
    path = tmp_path / "records.csv"
    write_records_csv(path, [rec])
    assert main(["plot", "--records", str(path), "--out-dir", str(tmp_path / "p")]) == 0
    assert len(list((tmp_path / "p").glob("*.svg"))) == 6

    write_records_csv(path, [])
    assert main(["plot", "--records", str(path), "--out-dir", str(tmp_path / "q")]) == 1
    assert main(["plot", "--records", str(tmp_path / "missing.csv"), "--out-dir", str(tmp_path / "q")]) == 1


def test_module_entry_point():
    result = subprocess.run([sys.executable, "-m", "sparse_iht", "--help"], capture_output=True, text=True)
    assert result.returncode == 0 and "train-sparse" in result.stdout
