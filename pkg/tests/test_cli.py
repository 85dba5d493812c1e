import json

import numpy as np
import pytest

from zshar import data
from zshar.cli import main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def fixture_dir(workdir):
    out = workdir / "fixture"
    rc = main([
        "synth", "--out", str(out), "--seed", "1",
        "--classes", "6", "--superclasses", "3", "--samples-per-class", "8",
        "--n", "32", "--d", "4", "--frames", "16", "--skeletons-per-class", "3",
        "--embedding-dim", "8",
    ])
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def folds_file(workdir, fixture_dir):
    out = workdir / "folds.json"
    rc = main([
        "split", "--manifest", str(fixture_dir / "manifest.json"),
        "--folds", "4", "--unseen-per-fold", "3", "--seed", "1",
        "--out", str(out),
    ])
    assert rc == 0
    return out


TRAIN_FLAGS = ["--epochs", "3", "--hidden", "8", "--batch", "16",
               "--decoder-frames", "16", "--seed", "1"]


@pytest.fixture(scope="module")
def trained_dir(workdir, fixture_dir, folds_file):
    out = workdir / "run"
    rc = main([
        "train", "--manifest", str(fixture_dir / "manifest.json"),
        "--folds-file", str(folds_file), "--fold", "0",
        "--out", str(out), *TRAIN_FLAGS,
    ])
    assert rc == 0
    return out


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def test_synth_output_passes_loader(fixture_dir):
    dataset = data.load_dataset(fixture_dir / "manifest.json")
    assert len(dataset.classes) == 6


def test_synth_same_seed_identical_bytes(workdir, fixture_dir):
    again = workdir / "fixture2"
    rc = main([
        "synth", "--out", str(again), "--seed", "1",
        "--classes", "6", "--superclasses", "3", "--samples-per-class", "8",
        "--n", "32", "--d", "4", "--frames", "16", "--skeletons-per-class", "3",
        "--embedding-dim", "8",
    ])
    assert rc == 0
    for rel in sorted(p.relative_to(fixture_dir) for p in fixture_dir.rglob("*") if p.is_file()):
        assert (again / rel).read_bytes() == (fixture_dir / rel).read_bytes(), rel


def test_synth_invalid_flag_value_exits_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--out", str(tmp_path / "x"), "--classes", "lots"])
    assert exc.value.code == 2


def test_synth_infeasible_config_exits_2(tmp_path, capsys):
    rc = main(["synth", "--out", str(tmp_path / "x"),
               "--classes", "3", "--superclasses", "3"])
    assert rc == 2
    assert "error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# split
# ---------------------------------------------------------------------------

def test_split_satisfies_superclass_invariant(fixture_dir, folds_file):
    dataset = data.load_dataset(fixture_dir / "manifest.json")
    folds = data.read_folds_json(folds_file)
    assert len(folds) == 4
    for f in folds:
        f.validate(dataset.classes, dataset.superclasses, both_sides=True)


def test_split_same_seed_identical_file(workdir, fixture_dir, folds_file):
    out2 = workdir / "folds2.json"
    rc = main([
        "split", "--manifest", str(fixture_dir / "manifest.json"),
        "--folds", "4", "--unseen-per-fold", "3", "--seed", "1",
        "--out", str(out2),
    ])
    assert rc == 0
    assert out2.read_bytes() == folds_file.read_bytes()


def test_split_infeasible_exits_2(fixture_dir, workdir, capsys):
    rc = main([
        "split", "--manifest", str(fixture_dir / "manifest.json"),
        "--folds", "1", "--unseen-per-fold", "99", "--seed", "1",
        "--out", str(workdir / "nope.json"),
    ])
    assert rc == 2
    assert "infeasible" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def test_train_writes_checkpoint_and_epoch_log(trained_dir):
    assert (trained_dir / "checkpoint.ckpt").is_file()
    lines = (trained_dir / "train_log.jsonl").read_text().splitlines()
    assert len(lines) == 3
    for line in lines:
        entry = json.loads(line)
        assert {"epoch", "loss_matching", "loss_classification",
                "loss_reconstruction", "loss_total", "val_accuracy"} <= set(entry)


def test_train_zero_weights_total_equals_matching(workdir, fixture_dir, folds_file):
    out = workdir / "ablate"
    rc = main([
        "train", "--manifest", str(fixture_dir / "manifest.json"),
        "--folds-file", str(folds_file), "--fold", "0",
        "--out", str(out), *TRAIN_FLAGS, "--lambda", "0", "--alpha", "0",
    ])
    assert rc == 0
    for line in (out / "train_log.jsonl").read_text().splitlines():
        entry = json.loads(line)
        assert entry["loss_total"] == entry["loss_matching"]


def test_train_missing_skeleton_dir_exits_2(workdir, fixture_dir, folds_file, capsys):
    manifest = json.loads((fixture_dir / "manifest.json").read_text())
    broken_dir = workdir / "broken"
    broken_dir.mkdir()
    manifest["skeleton_dir"] = str(fixture_dir / "no_such_dir")
    manifest["imu_path"] = str(fixture_dir / "imu.csv")
    manifest["semantics_path"] = str(fixture_dir / "semantics.json")
    manifest["superclass_path"] = str(fixture_dir / "superclasses.json")
    (broken_dir / "manifest.json").write_text(json.dumps(manifest))
    rc = main([
        "train", "--manifest", str(broken_dir / "manifest.json"),
        "--folds-file", str(folds_file), "--fold", "0",
        "--out", str(workdir / "nope"), *TRAIN_FLAGS,
    ])
    assert rc == 2
    assert "no_such_dir" in capsys.readouterr().err


def test_train_config_json_overrides_flags(workdir, fixture_dir, folds_file):
    cfg_path = workdir / "override.json"
    cfg_path.write_text(json.dumps({"epochs": 2}))
    out = workdir / "override_run"
    rc = main([
        "train", "--manifest", str(fixture_dir / "manifest.json"),
        "--folds-file", str(folds_file), "--fold", "0",
        "--out", str(out), *TRAIN_FLAGS, "--config", str(cfg_path),
    ])
    assert rc == 0
    assert len((out / "train_log.jsonl").read_text().splitlines()) == 2


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def test_eval_writes_populated_report(workdir, fixture_dir, trained_dir):
    out = workdir / "report.json"
    rc = main([
        "eval", "--checkpoint", str(trained_dir / "checkpoint.ckpt"),
        "--manifest", str(fixture_dir / "manifest.json"),
        "--out", str(out),
    ])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert 0.0 <= doc["average_accuracy_per_class"] <= 1.0
    assert doc["alignment"]["records"]
    assert np.isfinite(doc["alignment"]["add"])
    assert np.isfinite(doc["realism"]["dfd_mean"])
    assert doc["meta"]["seed"] == 1


def test_eval_rerun_identical_json(workdir, fixture_dir, trained_dir):
    out1 = workdir / "r1.json"
    out2 = workdir / "r2.json"
    for out in (out1, out2):
        rc = main([
            "eval", "--checkpoint", str(trained_dir / "checkpoint.ckpt"),
            "--manifest", str(fixture_dir / "manifest.json"),
            "--out", str(out),
        ])
        assert rc == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_eval_zero_unseen_samples_exits_2(workdir, fixture_dir, trained_dir, capsys):
    # a fold whose unseen classes have no labeled IMU samples
    dataset = data.load_dataset(fixture_dir / "manifest.json")
    folds = [data.FoldSpec(index=0, seen=sorted(dataset.classes), unseen=["missing"])]
    bad = workdir / "bad_folds.json"
    data.write_folds_json(bad, folds, seed=0)
    rc = main([
        "eval", "--checkpoint", str(trained_dir / "checkpoint.ckpt"),
        "--manifest", str(fixture_dir / "manifest.json"),
        "--folds-file", str(bad), "--fold", "0",
        "--out", str(workdir / "no_report.json"),
    ])
    assert rc == 2
    assert "unseen" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# explain
# ---------------------------------------------------------------------------

def test_explain_emits_svg_frames_and_csv(workdir, fixture_dir, trained_dir):
    from zshar.model import load_checkpoint

    dataset = data.load_dataset(fixture_dir / "manifest.json")
    fold = load_checkpoint(trained_dir / "checkpoint.ckpt").fold
    sample = dataset.windows_for(fold.unseen)[0]
    out = workdir / "exp"
    rc = main([
        "explain", "--checkpoint", str(trained_dir / "checkpoint.ckpt"),
        "--manifest", str(fixture_dir / "manifest.json"),
        "--sample-id", sample.id, "--out", str(out),
    ])
    assert rc == 0
    doc = json.loads((out / "explanation.json").read_text())
    svgs = sorted((out / "frames").glob("frame_*.svg"))
    assert len(svgs) == doc["frames"] == 16
    assert doc["predicted_class"] in fold.unseen
    assert doc["matching_seen_class"] in fold.seen
    assert doc["seed"] == 1
    # CSV round-trips to the same coordinates
    seq = data.read_skeleton_csv(out / "generated.csv", doc["predicted_class"],
                                 doc["joints"], doc["dims"])
    assert seq.frames == doc["frames"]


def test_explain_csv_round_trip_identical(workdir, fixture_dir, trained_dir):
    out = workdir / "exp"
    doc = json.loads((out / "explanation.json").read_text())
    seq = data.read_skeleton_csv(out / "generated.csv", "x", doc["joints"], doc["dims"])
    tmp = workdir / "rewrite.csv"
    data.write_skeleton_csv(tmp, seq)
    assert tmp.read_bytes() == (out / "generated.csv").read_bytes()


def test_explain_unknown_sample_exits_2(workdir, fixture_dir, trained_dir, capsys):
    rc = main([
        "explain", "--checkpoint", str(trained_dir / "checkpoint.ckpt"),
        "--manifest", str(fixture_dir / "manifest.json"),
        "--sample-id", "no_such_sample", "--out", str(workdir / "exp2"),
    ])
    assert rc == 2
    assert "no_such_sample" in capsys.readouterr().err
