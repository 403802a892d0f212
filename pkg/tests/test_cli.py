import csv
import json
import os

import pytest

from topomargin import persistence
from topomargin.cli import main
from topomargin.ingest import parse_xyz


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One synthetic mini-corpus shared by the pipeline tests, built the way
    a user would: synth -> ph."""
    root = tmp_path_factory.mktemp("cli")
    clouds = root / "clouds"
    diagrams = root / "diagrams"
    assert main(["synth", "--n-per-class", "6", "--seed", "5",
                 "--out", str(clouds)]) == 0
    xyz = sorted(str(p) for p in clouds.glob("*.xyz"))
    assert main(["ph", *xyz, "--cutoff", "0.01", "--out", str(diagrams)]) == 0
    return {"root": root, "clouds": clouds, "diagrams": diagrams,
            "labels": clouds / "labels.csv"}


def test_synth_writes_clouds_and_labels(pipeline):
    xyz = sorted(pipeline["clouds"].glob("*.xyz"))
    assert len(xyz) == 12
    with open(pipeline["labels"], newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["id", "label"]
    labels = {r[0]: int(r[1]) for r in rows[1:]}
    assert sorted(labels.values()).count(1) == 6
    pc = parse_xyz((pipeline["clouds"] / "circle000.xyz").read_text(), id="c")
    assert pc.dim == 2 and pc.n_points >= 20


def test_ph_emits_filtered_diagrams(pipeline):
    files = sorted(pipeline["diagrams"].glob("*.diagram.json"))
    assert len(files) == 12
    for f in files:
        pd = persistence.load_diagram(str(f))
        assert pd.n_bars(0) >= 1
        if pd.id.startswith("circle"):
            assert pd.n_bars(1) >= 1


def test_vectorize_train_predict_round_trip(pipeline, tmp_path):
    feats = tmp_path / "features.csv"
    model = tmp_path / "model.json"
    preds = tmp_path / "predictions.csv"
    d = str(pipeline["diagrams"])
    assert main(["vectorize", d, "--landmarks", d, "--out", str(feats)]) == 0
    manifest = json.loads((tmp_path / "features.csv.manifest.json").read_text())
    assert manifest["method"] == "bs" and len(manifest["landmark_ids"]) == 12

    assert main(["train", str(feats), str(pipeline["labels"]),
                 "--out", str(model)]) == 0
    obj = json.loads(model.read_text())
    assert len(obj["beta"]) == 12
    assert obj["preprocess"]["truncation_constant"] == manifest["truncation_constant"]

    assert main(["predict", str(model), str(feats), "--out", str(preds)]) == 0
    with open(preds, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["id", "score", "label"]
    labels = {}
    with open(pipeline["labels"], newline="") as fh:
        for row in csv.reader(fh):
            if row and row[0] != "id":
                labels[row[0]] = int(row[1])
    # training-set predictions on the separable corpus come back correct
    assert all(int(r[2]) == labels[r[0]] for r in rows[1:])


def test_stat_vectorize_needs_no_landmarks(pipeline, tmp_path):
    feats = tmp_path / "stat.csv"
    assert main(["vectorize", str(pipeline["diagrams"]), "--method", "stat2",
                 "--out", str(feats)]) == 0
    with open(feats, newline="") as fh:
        header = next(csv.reader(fh))
    assert len(header) == 1 + 25


def test_eval_writes_deterministic_report(pipeline, tmp_path, capsys):
    args = ["eval", str(pipeline["diagrams"]), str(pipeline["labels"]),
            "--train-fractions", "0.5,0.8", "--repeats", "2", "--seed", "3"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == 0
    table = capsys.readouterr().out
    assert "method" in table and "50%" in table and "80%" in table
    assert main(args + ["--out", str(out2)]) == 0
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    assert (out1 / "timing.json").exists()
    report = json.loads((out1 / "report.json").read_text())
    assert report["config"]["seed"] == 3
    assert {c["fraction"] for c in report["cells"]} == {0.5, 0.8}


def test_predict_function_subcommand(pipeline, tmp_path):
    known = tmp_path / "known"
    cands = tmp_path / "cands"
    known.mkdir(), cands.mkdir()
    files = sorted(pipeline["diagrams"].glob("*.diagram.json"))
    for f in files[:10]:
        (known / f.name).write_bytes(f.read_bytes())
    for f in files[10:]:
        (cands / f.name).write_bytes(f.read_bytes())
    labels = tmp_path / "labels.csv"
    labels.write_bytes(pipeline["labels"].read_bytes())
    out = tmp_path / "fn"
    assert main(["predict-function", str(known), str(labels), str(cands),
                 "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert len(report["candidates"]) == len(files) - 10
    assert (out / "model.json").exists()


def test_ingest_and_embed_subcommands(pipeline, tmp_path):
    src = pipeline["clouds"] / "circle000.xyz"
    out = tmp_path / "ing"
    assert main(["ingest", str(src), "--out", str(out)]) == 0
    assert (out / "circle000.xyz").exists()

    emb = tmp_path / "emb"
    assert main(["embed", str(src), "--threshold", "0.5", "--spectral",
                 "--dim", "4", "--out", str(emb)]) == 0
    pc = parse_xyz((emb / "circle000.embedded.xyz").read_text(), id="e")
    assert pc.dim == 4 and pc.n_points >= 20


def test_error_exit_codes(pipeline, tmp_path):
    # bs vectorization without landmarks is a usage error
    assert main(["vectorize", str(pipeline["diagrams"]),
                 "--out", str(tmp_path / "f.csv")]) == 2
    # malformed structure file maps to a nonzero parse failure
    bad = tmp_path / "bad.xyz"
    bad.write_text("1.0 2.0\nnot numbers here\n")
    assert main(["ingest", str(bad), "--out", str(tmp_path)]) == 1
    # labels that do not cover the feature ids
    feats = tmp_path / "stat.csv"
    assert main(["vectorize", str(pipeline["diagrams"]), "--method", "stat1",
                 "--out", str(feats)]) == 0
    empty = tmp_path / "empty.csv"
    empty.write_text("id,label\n")
    assert main(["train", str(feats), str(empty),
                 "--out", str(tmp_path / "m.json")]) == 2
