import subprocess
import sys

import pytest

from fastsda.cli import main
from fastsda.data import DataView, MultiViewDataset, save_csv, write_multiview
from fastsda.evaluation import gaussian_mixture


@pytest.fixture
def csv_dataset(tmp_path):
    x, cls, _ = gaussian_mixture(80, 5, 2, 2, 0, spread=2.0)
    path = tmp_path / "mix.csv"
    save_csv(DataView(x, cls), path)
    return path


@pytest.fixture
def manifest(tmp_path):
    x, cls, _ = gaussian_mixture(60, 6, 2, 2, 1, spread=2.0)
    views = [DataView(x[:3], cls, 0, "a"), DataView(x[3:], cls, 1, "b")]
    return write_multiview(MultiViewDataset(views, "two"), tmp_path / "two", "two")


def headers(path):
    lines = path.read_text().splitlines()
    return [ln for ln in lines if ln.startswith("# invocation:") or ln.startswith("# seed:")]


def test_oracle_check_single(capsys):
    assert main(["oracle-check"]) == 0
    out = capsys.readouterr().out
    assert "rank 3 (expected 3)" in out and "all checks passed" in out


def test_oracle_check_multiview(capsys):
    assert main(["oracle-check", "--config", "multiview"]) == 0
    assert "rank 7" in capsys.readouterr().out


def test_oracle_check_corrupted(capsys):
    assert main(["oracle-check", "--corrupt", "1e-3"]) == 1
    out = capsys.readouterr().out
    assert "FAIL\trow_sums" in out


def test_oracle_check_sizes(tmp_path):
    out = tmp_path / "check.txt"
    assert main(["oracle-check", "--sizes", "[[2, 3, 4], [5, 1, 2], [3, 3, 3]]",
                 "--out", str(out)]) == 0
    assert len(headers(out)) == 2


def test_fit_and_transform(tmp_path, csv_dataset):
    model = tmp_path / "m.model"
    assert main(["fit", "--dataset", str(csv_dataset), "--z", "2", "--alpha", "1",
                 "--seed", "3", "--out", str(model)]) == 0
    log = (tmp_path / "m.model.log").read_text()
    assert "d: 3" in log and "fit_seconds" in log and "# seed: 3" in log
    assert model.read_text().startswith("FASTSDA-MODEL v1 linear\n# invocation: fastsda fit")
    emb = tmp_path / "emb.tsv"
    assert main(["transform", "--model", str(model), "--dataset", str(csv_dataset),
                 "--out", str(emb)]) == 0
    rows = [ln.split("\t") for ln in emb.read_text().splitlines() if not ln.startswith("#")]
    assert rows[0] == ["sample", "class", "y0", "y1", "y2"] and len(rows) == 81


@pytest.mark.parametrize("method", ["sv-kernel", "sv-approx"])
def test_fit_kernel_methods(tmp_path, csv_dataset, method):
    out = tmp_path / "k.model"
    assert main(["fit", "--dataset", str(csv_dataset), "--method", method, "--z", "2",
                 "--prototypes", "20", "--out", str(out)]) == 0


@pytest.mark.parametrize("method", ["mv-linear", "mv-kernel"])
def test_fit_multiview(tmp_path, manifest, method):
    out = tmp_path / "mv.model"
    assert main(["fit", "--dataset", str(manifest), "--method", method, "--z", "2",
                 "--out", str(out)]) == 0
    d = int(next(ln for ln in (tmp_path / "mv.model.log").read_text().splitlines()
                 if ln.startswith("d: "))[3:])
    assert 1 <= d <= 7
    emb = tmp_path / "mv.tsv"
    assert main(["transform", "--model", str(out), "--dataset", str(manifest),
                 "--out", str(emb)]) == 0


def test_class_too_small(tmp_path, csv_dataset, capsys):
    code = main(["fit", "--dataset", str(csv_dataset), "--z", "500", "--out",
                 str(tmp_path / "m")])
    assert code == 3
    err = capsys.readouterr().err.strip()
    assert "ClassTooSmall" in err and "\n" not in err


def test_invalid_arguments(capsys):
    with pytest.raises(SystemExit) as info:
        main(["fit", "--dataset", "x.csv", "--z", "two", "--out", "m"])
    assert info.value.code == 2
    assert len(capsys.readouterr().err.strip().splitlines()) == 1
    with pytest.raises(SystemExit) as info:
        main(["eval", "--dataset", "x.csv", "--method", "nope", "--out", "o"])
    assert info.value.code == 2


def test_missing_file(tmp_path):
    assert main(["fit", "--dataset", str(tmp_path / "none.csv"), "--z", "2",
                 "--out", str(tmp_path / "m")]) == 3


def test_cluster(tmp_path, manifest):
    out = tmp_path / "sub.tsv"
    assert main(["cluster", "--dataset", str(manifest), "--z", "3", "--per-view",
                 "--out", str(out)]) == 0
    rows = [ln.split("\t") for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert rows[0] == ["sample", "class", "view0", "view1"]
    assert {r[2] for r in rows[1:]} == {"0", "1", "2"}


def test_eval_deterministic(tmp_path, csv_dataset):
    args = ["eval", "--dataset", str(csv_dataset), "--method", "sv-linear", "--seed", "7",
            "--z", "1", "2", "--alpha", "0.1", "1", "--out", str(tmp_path / "r")]
    assert main(args) == 0
    first = {s: (tmp_path / f"r.{s}").read_text() for s in ("tsv", "txt")}
    assert main(args) == 0
    for s, text in first.items():
        assert (tmp_path / f"r.{s}").read_text() == text
    rows = [ln for ln in first["tsv"].splitlines() if not ln.startswith("#")]
    assert rows[0].split("\t")[0] == "rotation" and len(rows) == 6
    assert (tmp_path / "r.timing.tsv").exists()


def test_eval_oracle_sorted(tmp_path, csv_dataset):
    assert main(["eval", "--dataset", str(csv_dataset), "--method", "oracle-sorted",
                 "--z", "2", "--alpha", "1", "--out", str(tmp_path / "o")]) == 0


def test_bench(tmp_path):
    assert main(["bench", "--d-grid", "30", "60", "--n-grid", "50", "--c", "2",
                 "--repeats", "1", "--out", str(tmp_path / "b.tsv")]) == 0
    rows = [ln.split("\t") for ln in (tmp_path / "b.tsv").read_text().splitlines()
            if not ln.startswith("#")]
    assert rows[0] == ["D", "N", "C", "Z", "t_oracle", "t_fast", "ratio"]
    assert all(len(r) == 7 for r in rows) and len(rows) == 3
    assert all(float(r[6]) > 0 for r in rows[1:])


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fastsda", "oracle-check"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "all checks passed" in out.stdout
