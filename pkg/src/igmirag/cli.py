"""Command-line entry points for indexing, querying, and evaluation.

Exit codes: 2 for missing paths (argument validation), 3 for gateway
failures, 1 for other fatal errors.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .config import EngineConfig
from .engine import Engine
from .errors import BuildFailure, CorruptStore, GatewayError
from .extraction import STATS_FILE, build_index, load_corpus, save_store
from .gateway import make_gateway
from .report import run_eval

GATEWAY_EXIT = 3


def _load_config(config_path: Path | None) -> EngineConfig:
    if config_path is None:
        return EngineConfig()
    try:
        return EngineConfig.load(config_path)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


def _gateway_exit(exc: GatewayError) -> None:
    click.echo(f"gateway failure: {exc}", err=True)
    sys.exit(GATEWAY_EXIT)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    """Hypergraph-indexed retrieval-augmented generation."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.argument("corpus", type=click.Path(exists=True, path_type=Path))
@click.option(
    "-c",
    "--config",
    "config_path",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="Engine config JSON.",
)
@click.option(
    "-o",
    "--out",
    "store_dir",
    type=click.Path(path_type=Path),
    default=Path("igmirag_store"),
    show_default=True,
    help="Store directory to write.",
)
def index(corpus: Path, config_path: Path | None, store_dir: Path) -> None:
    """Build a store from a corpus directory or JSONL file."""
    config = _load_config(config_path)
    try:
        gateway = make_gateway(config.gateway, config.base_dir)
        documents = load_corpus(corpus)
        result = build_index(documents, config, gateway)
    except GatewayError as exc:
        _gateway_exit(exc)
    except (BuildFailure, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    save_store(result, store_dir)
    stats = result.stats
    click.echo(f"Entities: {stats['entities']}")
    click.echo(f"Pairwise Relations: {stats['pairs']}")
    click.echo(f"Multiple Associations: {stats['associations']}")
    click.echo(f"Chunks: {stats['chunks']}")
    click.echo(f"Tokens: {stats['tokens']}")
    if stats.get("failed_chunks"):
        click.echo(f"Failed chunks: {stats['failed_chunks']}", err=True)
    click.echo(f"Store written to {store_dir}")


@main.command()
@click.argument("store", type=click.Path(exists=True, path_type=Path))
@click.argument("question")
@click.option(
    "-c",
    "--config",
    "config_path",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="Engine config JSON.",
)
@click.option(
    "--no-diffusion",
    is_flag=True,
    help="Ablation: answer from anchors and their chunks only.",
)
@click.option(
    "--dump-context",
    "dump_context",
    type=click.Path(path_type=Path),
    default=None,
    help="Write the rendered context window to this file.",
)
@click.option(
    "--trace-diffusion",
    "trace_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Write the diffusion trace (JSON lines) to this file.",
)
def query(
    store: Path,
    question: str,
    config_path: Path | None,
    no_diffusion: bool,
    dump_context: Path | None,
    trace_path: Path | None,
) -> None:
    """Answer one question against a built store."""
    config = _load_config(config_path)
    try:
        engine = Engine.load(store, config)
    except CorruptStore as exc:
        raise click.ClickException(str(exc)) from exc
    try:
        result = engine.query(question, use_diffusion=not no_diffusion)
    except GatewayError as exc:
        # A failure after diffusion still leaves a partial trace worth dumping.
        if trace_path is not None and engine.last_diffusion is not None:
            trace_path.write_text(
                "\n".join(engine.last_diffusion.trace) + "\n", encoding="utf-8"
            )
            click.echo(f"partial diffusion trace written to {trace_path}", err=True)
        _gateway_exit(exc)

    if result.fallback_used:
        click.echo("note: strategy parse failed; fallback strategy used", err=True)
    if dump_context is not None:
        dump_context.write_text(result.window.rendered, encoding="utf-8")
        click.echo(f"context written to {dump_context}", err=True)
    if trace_path is not None:
        lines = result.diffusion.trace if result.diffusion is not None else []
        trace_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        click.echo(f"diffusion trace written to {trace_path}", err=True)

    if result.answer.thought:
        click.echo(f"Thought: {result.answer.thought}")
    click.echo(f"Answer: {result.answer.answer}")
    click.echo(
        f"[tokens: prompt={result.prompt_tokens} completion={result.completion_tokens} "
        f"depth={result.depth_used}]",
        err=True,
    )


@main.command()
@click.argument("store", type=click.Path(exists=True, path_type=Path))
@click.argument("qa_file", type=click.Path(exists=True, path_type=Path))
@click.option(
    "-c",
    "--config",
    "config_path",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="Engine config JSON.",
)
@click.option("--judge", is_flag=True, help="Score with the LLM rubric instead of EM/F1.")
@click.option(
    "--no-diffusion",
    is_flag=True,
    help="Ablation: answer from anchors and their chunks only.",
)
@click.option(
    "-o",
    "--out",
    "out_dir",
    type=click.Path(path_type=Path),
    default=Path("eval_report"),
    show_default=True,
    help="Directory for report.json, records.csv, and the depth histogram.",
)
def eval(
    store: Path,
    qa_file: Path,
    config_path: Path | None,
    judge: bool,
    no_diffusion: bool,
    out_dir: Path,
) -> None:
    """Run batch QA evaluation and write report files."""
    config = _load_config(config_path)
    try:
        engine = Engine.load(store, config)
    except CorruptStore as exc:
        raise click.ClickException(str(exc)) from exc
    try:
        report = run_eval(
            engine,
            qa_file,
            judge=judge,
            use_diffusion=not no_diffusion,
            out_dir=out_dir,
        )
    except GatewayError as exc:
        _gateway_exit(exc)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc

    scale = "0-100" if judge else "0-1"
    click.echo(f"Questions: {report.total} (failed: {report.failed})")
    click.echo(f"EM ({scale}): {report.em_mean:.4f}")
    click.echo(f"F1 ({scale}): {report.f1_mean:.4f}")
    click.echo(f"Avg tokens/query: {report.avg_tokens:.1f}")
    if judge:
        click.echo(f"Judge failures: {report.judge_failures}")
    shares = " ".join(
        f"d{depth}={share:.0f}%" for depth, share in sorted(report.depth_histogram.items())
    )
    click.echo(f"Depth distribution: {shares}")
    click.echo(f"Report files in {out_dir}")


@main.command()
@click.argument("store", type=click.Path(exists=True, path_type=Path))
def inspect(store: Path) -> None:
    """Print the stats and layer counts of a built store."""
    stats_path = store / STATS_FILE
    if not stats_path.exists():
        raise click.ClickException(f"store stats missing: {stats_path}")
    stats = json.loads(stats_path.read_text(encoding="utf-8"))
    click.echo(f"Entities: {stats.get('entities', 0)}")
    click.echo(f"Pairwise Relations: {stats.get('pairs', 0)}")
    click.echo(f"Multiple Associations: {stats.get('associations', 0)}")
    click.echo(f"Chunks: {stats.get('chunks', 0)}")
    click.echo(f"Tokens: {stats.get('tokens', 0)}")
    if stats.get("failed_chunks"):
        click.echo(f"Failed chunks: {stats['failed_chunks']}")


if __name__ == "__main__":
    main()
