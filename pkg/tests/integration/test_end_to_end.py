"""
End-to-end runs at desk scale: real training, full CLI pipeline, live stream.

Each test trains models from scratch and takes minutes; run the quick suite
with `pytest -m "not slow"`.
"""

import json

import pytest
from typer.testing import CliRunner

from src.bench import parse_report
from src.cli.commands import app
from src.config.settings import SEED_ENV
from src.data import generate_paired_dataset, generate_stream_dataset, scripted_stream, split_dataset
from src.models import Cnn3dConfig, Cnn3dModel, LstmConfig, LstmModel
from src.training import TrainConfig, evaluate, train

pytestmark = pytest.mark.slow

runner = CliRunner()

CHARSET = "ABCDEFGHIJ"
REST = 10


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    monkeypatch.setenv("GESTUREBENCH_HOME", str(tmp_path / "home"))
    monkeypatch.setenv(SEED_ENV, "0")
    monkeypatch.delenv(SEED_ENV)
    monkeypatch.chdir(tmp_path)


@pytest.fixture(scope="module")
def desk_data():
    """10 classes x 60 samples, paired 16x32x32x1 volumes, 80/20 split."""
    landmarks, volumes = generate_paired_dataset(10, 60, 30, (16, 32, 32, 1), 0.01, 1.5, seed=42)
    return split_dataset(landmarks, 0.2, seed=42), split_dataset(volumes, 0.2, seed=42)


@pytest.fixture(scope="module")
def trained_lstm(desk_data):
    (train_set, test_set), _ = desk_data
    model = LstmModel(LstmConfig(num_classes=10), seed=0)
    checkpoint, _ = train(model, train_set, None, TrainConfig(epochs=30, early_stop_patience=0))
    return checkpoint


class TestDeskAccuracy:
    """Both families learn the synthetic gesture set."""

    def test_lstm(self, desk_data, trained_lstm):
        """The LSTM reaches 90% held-out accuracy."""
        (_, test_set), _ = desk_data
        assert evaluate(trained_lstm, test_set).accuracy >= 0.90

    def test_cnn3d(self, desk_data):
        """The 3D CNN reaches 90% held-out accuracy."""
        _, (train_set, test_set) = desk_data
        model = Cnn3dModel(Cnn3dConfig(num_classes=10), seed=0)
        checkpoint, _ = train(model, train_set, None, TrainConfig(epochs=30, early_stop_patience=0))
        assert evaluate(checkpoint, test_set).accuracy >= 0.90


class TestPipeline:
    """gen-data -> train x2 -> bench through the command line."""

    def test_trends_hold(self, tmp_path):
        """Accuracy, latency and parameter trends all hold in the report."""
        data = tmp_path / "data"
        result = runner.invoke(
            app, ["gen-data", "--out", str(data), "--classes", "10", "--samples-per-class", "60",
                  "--volumes", "16x32x32x1", "--seed", "42"],
        )
        assert result.exit_code == 0, result.output

        ckpts = {}
        for family in ("lstm", "cnn3d"):
            ckpts[family] = tmp_path / f"{family}.ckpt"
            result = runner.invoke(
                app, ["train", "--model", family, "--data", str(data), "--out", str(ckpts[family]), "--seed", "42"]
            )
            assert result.exit_code == 0, result.output

        report_path = tmp_path / "report.json"
        result = runner.invoke(
            app, ["bench", "--ckpt-lstm", str(ckpts["lstm"]), "--ckpt-cnn", str(ckpts["cnn3d"]),
                  "--data", str(data), "--trials", "20", "--warmup", "2", "--out", str(report_path)],
        )
        assert result.exit_code == 0, result.output

        report = parse_report(report_path.read_bytes())
        trends = report.derived.trends
        assert trends.accuracy
        assert trends.latency
        assert trends.params
        assert report.derived.latency_ratio > 1.0
        assert report.lstm.accuracy is not None and report.cnn3d.accuracy is not None
        assert json.loads(report_path.read_text())["derived"]["trends"]["params"] is True


@pytest.fixture(scope="module")
def stream_ckpt(tmp_path_factory):
    """LSTM with a rest class, trained on windows cut the way a live stream cuts them."""
    dataset = generate_stream_dataset(10, 60, 180, seed=7)
    train_set, test_set = split_dataset(dataset, 0.2, seed=7)
    model = LstmModel(LstmConfig(num_classes=REST + 1), seed=0)
    checkpoint, _ = train(model, train_set, None, TrainConfig(epochs=30, early_stop_patience=0))
    assert evaluate(checkpoint, test_set).accuracy >= 0.90
    return checkpoint.save(tmp_path_factory.mktemp("stream") / "lstm-rest.ckpt")


class TestLiveStream:
    """Scripted words through the stream command with the shipped gating."""

    @pytest.mark.parametrize("word", ["BEACH", "CABBA", "BEEFJ"])
    def test_spells_word(self, stream_ckpt, word):
        """Each word is spelled exactly, double letters included, and replays byte for byte."""
        stream = scripted_stream([CHARSET.index(ch) for ch in word], seed=sum(map(ord, word)))
        lines = "".join(json.dumps({"frame": f.tolist()}) + "\n" for f in stream.frames)
        args = ["stream", "--ckpt", str(stream_ckpt), "--rest-class", str(REST)]

        result = runner.invoke(app, args, input=lines)
        assert result.exit_code == 0, result.output
        events = [json.loads(line) for line in result.stdout.splitlines() if line.strip()]
        assert "".join(e["char"] for e in events if e["kind"] == "emit") == word
        assert not [e for e in events if e["kind"] == "rejected"]

        replay = runner.invoke(app, args, input=lines)
        assert replay.stdout == result.stdout
