import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from otw import cli
from otw.errors import DatasetError
from otw.evaluation import LabeledDataset
from otw.io import read_ucr_tsv, write_csv, write_dataset, write_json

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"
TIMING = cli.TIMING_MARKERS


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if not any(t in k for t in TIMING)}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def synth_files(tmp_path, capsys):
    code, out, _ = run(capsys, "synth", "--per-class", 6, "--length", 32, "--width", 4, "--left", 4,
                       "--right", 20, "--out", tmp_path, "--prefix", "S")
    assert code == 0
    doc = json.loads(out)
    return Path(doc["train"]), Path(doc["test"])


class TestReader:
    def test_small_file(self, tmp_path):
        p = tmp_path / "x.tsv"
        p.write_text("1\t0.5\t0.25\n2\t0.0\t1.0\n")
        d = read_ucr_tsv(p)
        np.testing.assert_array_equal(d.series, [[0.5, 0.25], [0.0, 1.0]])
        assert d.labels.tolist() == [1, 2] and d.name == "x"

    def test_labels_verbatim(self, tmp_path):
        p = tmp_path / "x.tsv"
        p.write_text("-1\t0.5\n1.0\t0.0\n")
        assert read_ucr_tsv(p).labels.tolist() == [-1, 1]

    def test_csv_flag(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("3,1,2\n")
        np.testing.assert_array_equal(read_ucr_tsv(p, delimiter=",").series, [[1, 2]])

    def test_empty(self, tmp_path):
        p = tmp_path / "e.tsv"
        p.write_text("")
        with pytest.raises(DatasetError, match="no data"):
            read_ucr_tsv(p)

    def test_ragged(self, tmp_path):
        p = tmp_path / "r.tsv"
        p.write_text("1\t0\t1\n2\t0\n")
        with pytest.raises(DatasetError) as e:
            read_ucr_tsv(p)
        assert e.value.row == 2

    def test_non_numeric(self, tmp_path):
        p = tmp_path / "n.tsv"
        p.write_text("1\t0\t1\n2\t0\tx\n")
        with pytest.raises(DatasetError) as e:
            read_ucr_tsv(p)
        assert (e.value.row, e.value.column) == (2, 3)

    def test_bad_label(self, tmp_path):
        p = tmp_path / "l.tsv"
        p.write_text("1.5\t0\n")
        with pytest.raises(DatasetError) as e:
            read_ucr_tsv(p)
        assert (e.value.row, e.value.column) == (1, 1)

    def test_nan_rows_reported(self, tmp_path):
        p = tmp_path / "nan.tsv"
        p.write_text("1\t0\t1\n2\tNaN\t1\n1\t0\t1\n2\t1\tnan\n")
        with pytest.raises(DatasetError, match="rows 2, 4"):
            read_ucr_tsv(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_ucr_tsv(tmp_path / "absent.tsv")

    def test_round_trip(self, tmp_path, rng):
        d = LabeledDataset(rng.normal(size=(7, 13)) * 10 ** rng.uniform(-5, 5, size=(7, 1)), rng.integers(-3, 4, 7))
        write_dataset(d, tmp_path / "rt.tsv")
        back = read_ucr_tsv(tmp_path / "rt.tsv")
        np.testing.assert_allclose(back.series, d.series, rtol=1e-12, atol=0)
        np.testing.assert_array_equal(back.labels, d.labels)

    def test_writers(self, tmp_path):
        assert write_json({"b": 1, "a": [0.5]}) == '{\n  "a": [\n    0.5\n  ],\n  "b": 1\n}\n'
        with pytest.raises(ValueError):
            write_json({"x": float("nan")})
        text = write_csv([{"x": 1, "y": 2, "z": 3}], ["y", "x"], tmp_path / "o.csv")
        assert text == "y,x\n2,1\n" and (tmp_path / "o.csv").read_text() == text


class TestCommands:
    def test_dist_inline(self, capsys):
        code, out, _ = run(capsys, "dist", "--a", "1,2,3", "--b", "3,2,1")
        doc = json.loads(out)
        jsonschema.validate(doc, schema("dist"))
        assert code == 0 and doc["value"] == 4.0

    @pytest.mark.parametrize("argv, value", [
        (["--metric", "dtw", "--local-cost", "absolute"], 4.0),
        (["--metric", "dtw"], 8.0),
        (["--metric", "l1"], 4.0),
        (["--metric", "l2"], np.sqrt(8.0)),
        (["--s", "1"], 4.0),
    ])
    def test_dist_metrics(self, capsys, argv, value):
        code, out, _ = run(capsys, "dist", "--a", "1,2,3", "--b", "3,2,1", *argv)
        doc = json.loads(out)
        jsonschema.validate(doc, schema("dist"))
        assert code == 0 and doc["value"] == pytest.approx(value, rel=1e-15)

    def test_dist_from_file_and_csv(self, capsys, synth_files, tmp_path):
        train, _ = synth_files
        code, out, _ = run(capsys, "dist", "--a", f"{train}:1", "--b", f"{train}:2", "--format", "csv")
        assert code == 0 and out.splitlines()[0] == "metric_tag,n,value,seconds"

    def test_knn(self, capsys, synth_files):
        train, test = synth_files
        code, out, _ = run(capsys, "knn", "--train", train, "--test", test, "--repeats", 3, "--s", "1,n",
                           "--m", "1")
        doc = json.loads(out)
        jsonschema.validate(doc, schema("knn"))
        assert code == 0 and len(doc["runs"]) == 3 and doc["grid_size"] == 4
        assert [r["seed"] for r in doc["runs"]] == [0, 1, 2]

    def test_knn_dtw_and_l2(self, capsys, synth_files):
        train, test = synth_files
        for metric in ("dtw", "l2"):
            code, out, _ = run(capsys, "knn", "--train", train, "--test", test, "--repeats", 1,
                               "--metric", metric, "--normalize")
            jsonschema.validate(json.loads(out), schema("knn"))
            assert code == 0

    def test_cluster(self, capsys, synth_files):
        train, test = synth_files
        code, out, _ = run(capsys, "cluster", train, test, "--metric", "otw,l1")
        doc = json.loads(out)
        jsonschema.validate(doc, schema("cluster"))
        assert code == 0 and doc["size"] == 24 and [r["clusters"] for r in doc["results"]] == [4, 4]
        assert doc["results"][0]["rand_index"] == 1.0

    def test_cluster_cap(self, capsys, synth_files):
        train, _ = synth_files
        code, _, err = run(capsys, "cluster", train, "--max-samples", 5)
        assert code == 2 and "max-samples" in err

    def test_verify(self, capsys):
        code, out, _ = run(capsys, "verify", "--theorem", 20, "--shift", 20, "--interp", 20, "--balanced", 20)
        doc = json.loads(out)
        jsonschema.validate(doc, schema("verify"))
        assert code == 0 and doc["ok"]
        assert all(s["passed"] == s["total"] == 20 for s in doc["sweeps"])

    def test_verify_failure_exit_code(self, capsys, monkeypatch):
        from otw import sweeps

        real = sweeps.run_all

        def broken(*a, **k):
            reports = real(*a, **k)
            reports[0] = sweeps.SweepReport(reports[0].name, reports[0].total, reports[0].total - 1, 1.0, {})
            return reports

        monkeypatch.setattr(sweeps, "run_all", broken)
        code, out, _ = run(capsys, "verify", "--theorem", 3, "--shift", 3, "--interp", 3, "--balanced", 3)
        assert code == 3 and json.loads(out)["ok"] is False

    def test_bench_small(self, capsys):
        code, out, _ = run(capsys, "bench", "--min-n", 16, "--max-n", 64, "--layer-max-n", 32, "--reps", 3)
        doc = json.loads(out)
        jsonschema.validate(doc, schema("bench"))
        assert code == 0 and set(doc["slopes"]) == {"otw", "dtw", "otw_layer", "dtw_layer"}

    def test_synth_schema(self, capsys, tmp_path):
        code, out, _ = run(capsys, "synth", "--per-class", 4, "--out", tmp_path)
        doc = json.loads(out)
        jsonschema.validate(doc, schema("synth"))
        assert doc["train_size"] == 12 and doc["test_size"] == 4
        assert read_ucr_tsv(doc["train"]).length == 128

    def test_train(self, capsys, synth_files, tmp_path):
        train, test = synth_files
        hist = tmp_path / "h.csv"
        code, out, _ = run(capsys, "train", "--train", train, "--test", test, "--epochs", 3, "--hidden", 8,
                           "--out", hist)
        doc = json.loads(out)
        jsonschema.validate(doc, schema("train"))
        lines = hist.read_text().splitlines()
        assert code == 0 and lines[0] == "epoch,wall_seconds,train_loss,test_error,min_test_error"
        assert len(lines) == 4

    @pytest.mark.parametrize("layer", ["dtw", "linear"])
    def test_train_other_layers(self, capsys, synth_files, tmp_path, layer):
        train, test = synth_files
        code, out, _ = run(capsys, "train", "--train", train, "--test", test, "--epochs", 2, "--hidden", 4,
                           "--layer", layer, "--k", 2, "--out", tmp_path / "h.csv")
        jsonschema.validate(json.loads(out), schema("train"))
        assert code == 0


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        [],
        ["nope"],
        ["dist", "--a", "1,2"],
        ["dist", "--a", "1", "--b", "1", "--metric", "cosine"],
        ["dist", "--a", "1", "--b", "1", "--m", "x"],
        ["dist", "--a", "1", "--b", "1", "--threads", "0"],
        ["dist", "--a", "1,2", "--b", "1,2", "--m", "1,2"],
        ["train", "--epochs", "1"],
    ])
    def test_usage(self, capsys, argv):
        with pytest.raises(SystemExit) as e:
            code = cli.main(argv)
            raise SystemExit(code)
        assert e.value.code == 1

    @pytest.mark.parametrize("argv", [
        ["dist", "--a", "1,2", "--b", "1,2,3"],
        ["dist", "--a", "1,2", "--b", "1,2", "--m", "-1"],
        ["dist", "--a", "1,2", "--b", "1,2", "--s", "0"],
        ["dist", "--a", "nofile.tsv:1", "--b", "1"],
        ["knn", "--train", "nofile.tsv", "--test", "nofile.tsv"],
    ])
    def test_data(self, capsys, argv):
        assert cli.main(argv) == 2

    def test_bad_row(self, capsys, synth_files):
        train, _ = synth_files
        assert cli.main(["dist", "--a", f"{train}:999", "--b", "1"]) == 2


class TestDeterminism:
    def _twice(self, capsys, *argv):
        outs = [run(capsys, *argv, "--threads", 1) for _ in range(2)]
        assert outs[0][0] == outs[1][0] == 0
        return [strip_timing(json.loads(o[1])) for o in outs]

    def test_knn_and_cluster(self, capsys, synth_files):
        train, test = synth_files
        a, b = self._twice(capsys, "knn", "--train", train, "--test", test, "--repeats", 2, "--s", "1,4")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
        a, b = self._twice(capsys, "cluster", train, "--metric", "otw,dtw")
        assert a == b

    def test_thread_count_irrelevant(self, capsys, synth_files):
        train, test = synth_files
        base = ["knn", "--train", train, "--test", test, "--repeats", 2, "--s", "1,4"]
        one = strip_timing(json.loads(run(capsys, *base, "--threads", 1)[1]))
        four = strip_timing(json.loads(run(capsys, *base, "--threads", 4)[1]))
        assert one == four

    def test_synth_files_byte_identical(self, capsys, tmp_path):
        for d in ("x", "y"):
            run(capsys, "synth", "--per-class", 5, "--noise", 0.1, "--seed", 3, "--out", tmp_path / d)
        for f in ("SYNTH_TRAIN.tsv", "SYNTH_TEST.tsv"):
            assert (tmp_path / "x" / f).read_bytes() == (tmp_path / "y" / f).read_bytes()
