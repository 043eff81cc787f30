import csv
import json

import pytest

from posedtw.cli import main
from posedtw.synthetic import SEPARABLE_GESTURES

from test_keypoints import doc


@pytest.fixture
def openpose_dir(tmp_path):
    d = tmp_path / "clip"
    d.mkdir()
    for t in range(10):
        triples = [(300.0 + 2 * k, 100.0 + 5 * k, 0.9) for k in range(18)]
        triples[1] = (320.0, 100.0, 0.9)
        triples[2] = (300.0, 110.0, 0.9)
        triples[5] = (340.0 + t, 110.0, 0.9)
        (d / f"{t:03d}.json").write_text(doc(triples))
    return d


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--out-dir", str(out), "--seed", "2", "--subjects", "3",
                 "--trials", "2", "--gestures", ",".join(SEPARABLE_GESTURES[:4])]) == 0
    return out


@pytest.fixture(scope="module")
def templates(synth):
    path = synth / "templates.json"
    assert main(["train", "--manifest", str(synth / "manifest.json"), "--subject", "1",
                 "-o", str(path)]) == 0
    return path


def test_ingest(openpose_dir, tmp_path, capsys):
    out = tmp_path / "seq.json"
    assert main(["ingest", str(openpose_dir), "-o", str(out), "--label", "a1",
                 "--subject", "1", "--trial", "1", "--manifest", str(tmp_path / "m.json")]) == 0
    obj = json.loads(out.read_text())
    assert len(obj["frames"]) == 10 and obj["label"] == "a1"
    assert obj["frames"][0][2:4] == [0.0, 0.0]
    (entry,) = json.loads((tmp_path / "m.json").read_text())
    assert entry == {"path": "seq.json", "label": "a1", "subject": "1", "trial": 1}


def test_ingest_profile_frame(openpose_dir, tmp_path, capsys):
    triples = [(300.0, 100.0, 0.9)] * 18
    (openpose_dir / "004.json").write_text(doc(triples))
    assert main(["ingest", str(openpose_dir), "-o", str(tmp_path / "s.json")]) == 1
    assert "frame 4" in capsys.readouterr().err


def test_ingest_missing_dir(tmp_path):
    assert main(["ingest", str(tmp_path / "nope")]) == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["classify"])
    assert info.value.code == 2


def test_train_prints_choices(synth, tmp_path, capsys):
    assert main(["train", "--manifest", str(synth / "manifest.json"), "--subject", "1",
                 "-o", str(tmp_path / "t.json")]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4
    assert all(line.split("\t")[1].endswith(("_s1_t1", "_s1_t2")) for line in lines)
    assert len(json.loads((tmp_path / "t.json").read_text())["templates"]) == 4


def test_train_absent_subject(synth, tmp_path):
    assert main(["train", "--manifest", str(synth / "manifest.json"), "--subject", "42",
                 "-o", str(tmp_path / "t.json")]) == 1


def _template_file(templates, gid):
    obj = json.loads(templates.read_text())
    return obj["templates"][gid]


def test_classify_identity(templates, tmp_path, capsys):
    seq = tmp_path / "q.json"
    seq.write_text(json.dumps(_template_file(templates, "r_kick")))
    capsys.readouterr()
    assert main(["classify", str(seq), "--templates", str(templates)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["predicted"] == "r_kick"
    assert out["ranking"][0]["distance"] == 0.0


def test_classify_rejected_exit_zero(synth, templates, capsys):
    seq = synth / "sequences" / "l_step_s2_t1.json"
    capsys.readouterr()
    assert main(["classify", str(seq), "--templates", str(templates), "--reject-threshold", "0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["predicted"] == "REJECTED"
    assert out["ranking"][0]["distance"] > 0


def test_classify_failed_exit_three(synth, templates, capsys):
    seq = synth / "sequences" / "l_step_s2_t1.json"
    assert main(["classify", str(seq), "--templates", str(templates), "--t-var", "1000"]) == 3
    assert json.loads(capsys.readouterr().out)["predicted"] is None


def test_classify_bad_file(tmp_path, templates):
    (tmp_path / "bad.json").write_text("{")
    assert main(["classify", str(tmp_path / "bad.json"), "--templates", str(templates)]) == 1


def test_evaluate(synth, tmp_path, capsys):
    out = tmp_path / "cm.csv"
    assert main(["evaluate", "--manifest", str(synth / "manifest.json"), "--subject", "1",
                 "-o", str(out), "--threads", "1"]) == 0
    assert "accuracy 1.0000 (16/16)" in capsys.readouterr().out
    rows = list(csv.reader(open(out)))
    assert len(rows) == 5
    assert (tmp_path / "cm.png").stat().st_size > 0


def test_evaluate_sweep(synth, tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["evaluate", "--manifest", str(synth / "manifest.json"), "--subject", "1",
                 "--sweep", "0.05,0.10,0.15,0.20", "-o", str(out), "--threads", "1"]) == 0
    rows = list(csv.DictReader(open(out)))
    assert [float(r["t_var"]) for r in rows] == [0.05, 0.10, 0.15, 0.20]
    assert all(0 <= float(r["accuracy"]) <= 1 for r in rows)
    assert (tmp_path / "sweep.png").exists()


def test_evaluate_empty_manifest(tmp_path):
    (tmp_path / "m.json").write_text("[]")
    assert main(["evaluate", "--manifest", str(tmp_path / "m.json"), "--subject", "1"]) == 1


def test_config_precedence(synth, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"t_var": 1000.0}))
    seq = synth / "sequences" / "r_swipe_s2_t1.json"
    templates = tmp_path / "t.json"
    assert main(["train", "--manifest", str(synth / "manifest.json"), "--subject", "1",
                 "-o", str(templates)]) == 0
    assert main(["classify", str(seq), "--templates", str(templates), "--config", str(cfg)]) == 3
    monkeypatch.setenv("CONFIG", str(cfg))
    assert main(["classify", str(seq), "--templates", str(templates)]) == 3
    assert main(["classify", str(seq), "--templates", str(templates), "--t-var", "0.1"]) == 0


def test_bench(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--lengths", "16,64", "--radius", "1,64", "--repeats", "2",
                 "--csv", str(out)]) == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 6
    assert [r["method"] for r in rows] == ["exact", "fast", "fast"] * 2
    for r in rows:
        if r["radius"] == "64":
            assert float(r["mean_rel_error"]) == 0.0
        assert float(r["mean_seconds"]) >= 0
    assert (tmp_path / "bench.png").exists()


def test_bench_cardinality(capsys):
    assert main(["bench", "--lengths", "256,1024", "--radius", "1", "--repeats", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + 4
