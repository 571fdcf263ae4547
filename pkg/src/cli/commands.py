"""
CLI Commands - the whole comparison workflow as one executable.

Commands:
- gen-data: Write a synthetic landmark (and paired volume) dataset
- train: Train an LSTM or 3D CNN checkpoint
- eval: Score a checkpoint on a dataset
- bench: Measure both checkpoints and write the comparison report
- stream: Live translation over JSON-lines frames on stdin

Results go to stdout; logs and diagnostics go to stderr. Exit codes: 0 on
success, 1 on a runtime failure, 2 on a usage error.
"""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from src.bench.report import ComparisonReport, collect_metrics, compare, render_report, table_rows
from src.config.paths import runs_dir
from src.config.settings import SEED_ENV, load_settings
from src.core.errors import ConfigurationError, GestureBenchError
from src.core.fileio import atomic_write_bytes, atomic_write_text
from src.core.logging import StructuredLogger, configure_logging
from src.data.dataset import FrameVolume, split_dataset
from src.data.formats import read_for_modality, write_paired_dataset
from src.data.synth import (
    generate_landmark_dataset,
    generate_paired_dataset,
    generate_stream_dataset,
    render_paired,
)
from src.models import FAMILY_MODALITY, ModelCheckpoint, ModelFamily, build_model
from src.stream.pipeline import StreamPipeline, assemble_sentence
from src.training.trainer import evaluate, train as run_training

err_console = Console(stderr=True)
log = StructuredLogger(__name__)

app = typer.Typer(
    name="gesturebench",
    help="Landmark LSTM vs 3D CNN gesture recognition: data, training, benchmarks, live stream.",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def main_options(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
    log_json: Optional[Path] = typer.Option(None, "--log-json", help="Also write JSON-lines logs here"),
):
    """Global options."""
    configure_logging(verbose=verbose, json_path=log_json)


@contextmanager
def _failures() -> Iterator[None]:
    """Turn expected failures into a one-line diagnostic and exit code 1."""
    try:
        yield
    except (GestureBenchError, ValidationError, ValueError, OSError) as exc:
        message = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        err_console.print(f"[red]error:[/red] {message}", highlight=False, soft_wrap=True)
        raise typer.Exit(1) from exc


def _parse_dims(text: str) -> tuple[int, int, int, int]:
    parts = text.lower().replace(",", "x").split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise typer.BadParameter(f"expected T x H x W x C, got {text!r}")
    if len(dims) != 4 or min(dims) < 1:
        raise typer.BadParameter(f"expected four positive dims T x H x W x C, got {text!r}")
    return dims  # type: ignore[return-value]


# --- Data ---

@app.command("gen-data")
def gen_data(
    out: Path = typer.Option(..., "--out", "-o", help="Output directory"),
    classes: int = typer.Option(10, "--classes", min=1, help="Number of gesture classes"),
    samples_per_class: int = typer.Option(60, "--samples-per-class", min=1),
    frames: int = typer.Option(30, "--frames", min=2, help="Frames per landmark sequence"),
    noise: float = typer.Option(0.01, "--noise", min=0.0, help="Gaussian noise sigma"),
    seed: int = typer.Option(0, "--seed", envvar=SEED_ENV),
    volumes: Optional[str] = typer.Option(None, "--volumes", help="Also render paired volumes, e.g. 16x32x32x1"),
    blob_sigma: float = typer.Option(1.5, "--blob-sigma", min=0.01, help="Blob sigma in pixels"),
    rest_samples: int = typer.Option(
        0, "--rest-samples", min=0,
        help="Build stream windows with a rest class (label = --classes) holding this many samples",
    ),
):
    """Generate a synthetic dataset (landmarks.jsonl, plus volumes/ with --volumes)."""
    dims = _parse_dims(volumes) if volumes else None
    with _failures():
        if rest_samples:
            landmarks = generate_stream_dataset(classes, samples_per_class, rest_samples, frames, noise, seed)
            vols = render_paired(landmarks, dims, blob_sigma) if dims else None
        elif dims is None:
            landmarks, vols = generate_landmark_dataset(classes, samples_per_class, frames, noise, seed), None
        else:
            landmarks, vols = generate_paired_dataset(
                classes, samples_per_class, frames, dims, noise, blob_sigma, seed
            )
        write_paired_dataset(out, landmarks, vols)
    extra = f" with volumes {'x'.join(map(str, dims))}" if dims else ""
    if rest_samples:
        extra += f"; rest class {classes}"
    typer.echo(f"wrote {len(landmarks)} samples over {classes} classes to {out}{extra}")


# --- Training ---

@app.command()
def train(
    model: ModelFamily = typer.Option(..., "--model", "-m", help="Model family"),
    data: Path = typer.Option(..., "--data", "-d", help="Dataset root, JSONL file or volume directory"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="JSON config file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Checkpoint path"),
    epochs: Optional[int] = typer.Option(None, "--epochs", min=0, help="Override train.epochs"),
    seed: Optional[int] = typer.Option(None, "--seed", envvar=SEED_ENV, help="Override train.seed"),
):
    """Train a checkpoint; writes CKPT and CKPT.history.json."""
    out = out or runs_dir() / f"{model.value}.ckpt"
    with _failures():
        settings = load_settings(config)
        overrides = {k: v for k, v in {"epochs": epochs, "seed": seed}.items() if v is not None}
        train_cfg = settings.train.model_copy(update=overrides)

        dataset = read_for_modality(data, FAMILY_MODALITY[model])
        if not len(dataset):
            raise ValueError(f"{data} holds no samples")
        shape_hints: dict[str, object] = {"num_classes": dataset.num_classes}
        first = dataset[0]
        if isinstance(first, FrameVolume):
            shape_hints["input_dims"] = first.dims
        else:
            shape_hints["window_len"] = first.length
        model_cfg = settings.model.build_config(model, **shape_hints)

        if train_cfg.val_fraction > 0:
            train_set, val_set = split_dataset(dataset, train_cfg.val_fraction, train_cfg.seed)
        else:
            train_set, val_set = dataset, None

        net = build_model(model, model_cfg, seed=train_cfg.seed)
        checkpoint, history = run_training(net, train_set, val_set, train_cfg)
        checkpoint.save(out)
        history_path = out.with_name(out.name + ".history.json")
        atomic_write_text(history_path, json.dumps(history.to_records(), indent=2) + "\n")

    last = history.records[-1] if history.records else None
    summary = f"saved {model.value} checkpoint to {out} ({len(history)} epochs"
    if last is not None:
        summary += f", best epoch {history.best_epoch}, last train loss {last.train_loss:.4f}"
    typer.echo(summary + ")")


@app.command("eval")
def eval_cmd(
    ckpt: Path = typer.Option(..., "--ckpt", help="Checkpoint path"),
    data: Path = typer.Option(..., "--data", "-d", help="Dataset root, JSONL file or volume directory"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Also write the metrics JSON here"),
):
    """Print EvalMetrics JSON for a checkpoint on a dataset."""
    with _failures():
        checkpoint = ModelCheckpoint.load(ckpt)
        dataset = read_for_modality(data, checkpoint.modality)
        metrics = evaluate(checkpoint, dataset)
        text = json.dumps(metrics.to_dict(), sort_keys=True)
        if out is not None:
            atomic_write_text(out, text + "\n")
    typer.echo(text)


# --- Benchmark ---

def _rich_table(report: ComparisonReport) -> Table:
    table = Table(title="LSTM vs 3D CNN")
    table.add_column("Parameters", style="cyan")
    table.add_column("LSTM Model", style="green")
    table.add_column("3D CNN Model", style="magenta")
    for label, left, right in table_rows(report):
        table.add_row(label, left, right)
    return table


@app.command()
def bench(
    ckpt_lstm: Path = typer.Option(..., "--ckpt-lstm", help="LSTM checkpoint"),
    ckpt_cnn: Path = typer.Option(..., "--ckpt-cnn", help="3D CNN checkpoint"),
    trials: Optional[int] = typer.Option(None, "--trials", min=1, help="Timed inferences per model"),
    warmup: Optional[int] = typer.Option(None, "--warmup", min=0, help="Untimed inferences first"),
    data: Optional[Path] = typer.Option(None, "--data", "-d", help="Paired test set for accuracy"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="JSON config file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Report JSON path"),
):
    """Measure both checkpoints, write the report JSON and print the table."""
    out = out or runs_dir() / "report.json"
    with _failures():
        settings = load_settings(config)
        n_trials = trials if trials is not None else settings.bench.trials
        n_warmup = warmup if warmup is not None else settings.bench.warmup

        metrics = {}
        for family, path in ((ModelFamily.LSTM, ckpt_lstm), (ModelFamily.CNN3D, ckpt_cnn)):
            checkpoint = ModelCheckpoint.load(path)
            if checkpoint.family is not family:
                raise ConfigurationError(
                    f"{path} is a {checkpoint.family.value} checkpoint, expected {family.value}"
                )
            test_set = read_for_modality(data, checkpoint.modality) if data is not None else None
            metrics[family] = collect_metrics(checkpoint, test_set, n_trials, n_warmup)

        report = compare(metrics[ModelFamily.LSTM], metrics[ModelFamily.CNN3D])
        atomic_write_bytes(out, render_report(report, "json"))

    err_console.print(_rich_table(report))
    typer.echo(render_report(report, "text").decode("utf-8"), nl=False)
    log.info("report written", path=str(out))


# --- Stream ---

@app.command()
def stream(
    ckpt: Path = typer.Option(..., "--ckpt", help="LSTM checkpoint"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="JSON config file"),
    rest_class: Optional[int] = typer.Option(
        None, "--rest-class", min=0, help="Override stream.rest_class: the class meaning no sign"
    ),
):
    """Read {"frame": [63 floats]} lines on stdin, write event lines on stdout."""
    with _failures():
        settings = load_settings(config)
        stream_cfg = settings.stream
        if rest_class is not None:
            stream_cfg = stream_cfg.model_copy(update={"rest_class": rest_class})
        pipeline = StreamPipeline.from_model(ModelCheckpoint.load(ckpt), stream_cfg)

    events = []
    for line_no, line in enumerate(sys.stdin, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            frame = record["frame"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            produced = [pipeline.reject(f"line {line_no}: unreadable frame record ({exc})")]
        else:
            produced = pipeline.push_frame(frame)
        for event in produced:
            typer.echo(json.dumps(event.to_dict()))
        events.extend(produced)

    log.info("stream ended", sentence=assemble_sentence(events))
