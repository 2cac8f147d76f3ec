import json

import numpy as np
import pytest

from lsdc.cli import ConfigFile, main, preset_names
from lsdc.data import FeatureMatrix, load_features, save_features
from lsdc.errors import ConfigError
from lsdc.model import load_checkpoint

FAST_BLOBS = ["--set", "epochs=2", "--set", "data.n=200"]


@pytest.fixture(autouse=True)
def _in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def _output(capsys):
    return dict(line.split(" ", 1) for line in capsys.readouterr().out.splitlines())


def test_presets_are_valid():
    names = preset_names()
    assert {"blobs", "moons", "cifar10", "stl10"} <= set(names)
    for name in names:
        ConfigFile.from_path(name)


def test_config_text_and_overrides():
    config = ConfigFile.from_text("k_clusters = 3  # clusters\n\nsimilarity.kind = cosine\n"
                                  "similarity.tau = 0.5\n")
    assert config.run_config.k_clusters == 3
    assert config.run_config.similarity.tau == 0.5
    changed = config.with_overrides(["lr_steps=1,2", "epochs=5"])
    assert changed.run_config.lr_steps == (1, 2)
    assert config.run_config.epochs == 100


@pytest.mark.parametrize(
    ("text", "key"),
    [
        ("colour = red", "colour"),
        ("epochs = many", "epochs"),
        ("similarity.kind = knn\nsimilarity.k = 300", "similarity.k"),
    ],
)
def test_config_errors(text, key):
    with pytest.raises(ConfigError) as info:
        ConfigFile.from_text(text)
    assert info.value.key == key


def test_gen_then_kmeans(capsys):
    assert main(["gen", "blobs", "--n", "200", "--seed", "1", "--out", "blobs.bin"]) == 0
    features, labels = load_features("blobs.bin")
    assert features.data.shape == (200, 2)
    assert len(labels) == 200
    capsys.readouterr()
    assert main(["kmeans", "--features", "blobs.bin", "--k", "4", "--seed", "2"]) == 0
    assert float(_output(capsys)["acc"]) == 1.0


def test_kmeans_on_preset_is_reproducible(capsys):
    assert main(["kmeans", "--config", "blobs", "--seed", "5", "--out", "a.csv"]) == 0
    first = _output(capsys)
    assert main(["kmeans", "--config", "blobs", "--seed", "5", "--out", "b.csv"]) == 0
    assert _output(capsys) == first
    with open("a.csv") as a, open("b.csv") as b:
        assert a.read() == b.read()


def test_train_then_eval(tmp_path, capsys):
    assert main(["train", "--config", "blobs", *FAST_BLOBS, "--out", "run"]) == 0
    printed = _output(capsys)
    assert 0.0 <= float(printed["acc"]) <= 1.0
    run = tmp_path / "run"
    records = [json.loads(line) for line in (run / "report.jsonl").read_text().splitlines()]
    assert [r["epoch"] for r in records] == [0, 1]
    assert (run / "confusion.csv").exists()
    head, backbone = load_checkpoint(run / "head.lsdh")
    assert head.n_clusters == 4
    assert backbone is None

    assert main(["gen", "blobs", "--n", "200", "--out", "eval.bin"]) == 0
    capsys.readouterr()
    code = main(
        ["eval", "--checkpoint", str(run / "head.lsdh"), "--features", "eval.bin",
         "--threshold", "0.9", "--out", "eval.csv"]
    )
    assert code == 0
    printed = _output(capsys)
    assert printed["confident"].endswith("of 200")
    assert "acc" in printed

    save_features("wide.bin", FeatureMatrix(np.zeros((4, 3))))
    assert main(["eval", "--checkpoint", str(run / "head.lsdh"), "--features", "wide.bin"]) == 3


def test_train_config_error_exit_code():
    code = main(["train", "--config", "moons", "--set", "similarity.k=300", "--out", "run"])
    assert code == 2


def test_missing_files_exit_code():
    assert main(["kmeans", "--features", "missing.bin", "--k", "2"]) == 3
    assert main(["train", "--config", "mnist", "--set", "epochs=1", "--out", "run"]) == 3
    assert main(["train", "--config", "no-such-preset", "--out", "run"]) == 2


def test_edges_on_collinear_points(tmp_path, capsys):
    save_features("line.csv", FeatureMatrix(np.array([[0.0], [1.0], [2.0]])), fmt="csv")
    code = main(
        ["edges", "--features", "line.csv", "--format", "csv", "--kind", "l2", "--tau", "1.5",
         "--out", "edges.txt"]
    )
    assert code == 0
    assert _output(capsys)["edges"] == "2"
    assert (tmp_path / "edges.txt").read_text().split() == ["0", "1", "1", "2"]


def test_edges_calibrated_to_a_count(capsys):
    assert main(["gen", "moons", "--n", "60", "--seed", "3", "--out", "moons.bin"]) == 0
    capsys.readouterr()
    code = main(
        ["edges", "--features", "moons.bin", "--kind", "l2", "--n-edges", "65", "--out", "e.txt"]
    )
    assert code == 0
    assert _output(capsys)["edges"] == "65"
