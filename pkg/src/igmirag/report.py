"""Batch evaluation: per-question scoring, aggregates, and report files.

Questions run serially in file order so token deltas attribute cleanly
to records and reruns are deterministic.  The report directory receives
report.json, records.csv, and a depth-distribution figure.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Engine
from .errors import GatewayError, JudgeFailure
from .metrics import judge_score, short_form_score

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
RECORDS_FILE = "records.csv"
HISTOGRAM_FILE = "depth_histogram.png"

CSV_COLUMNS = [
    "question",
    "gold_answers",
    "predicted",
    "em",
    "f1",
    "tokens",
    "depth_used",
    "error",
]


@dataclass
class EvalRecord:
    question: str
    golds: list[str]
    predicted: str = ""
    em: float = 0.0
    f1: float = 0.0
    tokens: int = 0
    depth_used: int = 0
    error: str = ""

    def to_row(self) -> dict:
        return {
            "question": self.question,
            "gold_answers": json.dumps(self.golds, ensure_ascii=False),
            "predicted": self.predicted,
            "em": self.em,
            "f1": self.f1,
            "tokens": self.tokens,
            "depth_used": self.depth_used,
            "error": self.error,
        }


@dataclass
class EvalReport:
    records: list[EvalRecord]
    em_mean: float
    f1_mean: float
    avg_tokens: float
    depth_histogram: dict[int, float]
    total: int
    failed: int
    judge_failures: int
    ledger_tokens: int
    out_dir: Path | None = None
    files: dict[str, Path] = field(default_factory=dict)


def load_qa(path: str | Path) -> list[dict]:
    """Read JSON-lines {question, answers} records."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            question = row.get("question", "")
            answers = row.get("answers", [])
            if not question or not isinstance(answers, list) or not answers:
                raise ValueError(
                    f"{path}:{line_no}: QA rows need a question and a nonempty answers list"
                )
            records.append({"question": question, "answers": [str(a) for a in answers]})
    if not records:
        raise ValueError(f"{path}: no QA records found")
    return records


def _depth_histogram(records: list[EvalRecord]) -> dict[int, float]:
    scored = [r for r in records if not r.error]
    shares = {}
    for depth in range(1, 6):
        count = sum(1 for r in scored if r.depth_used == depth)
        shares[depth] = 100.0 * count / len(scored) if scored else 0.0
    return shares


def _render_histogram(histogram: dict[int, float], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    depths = sorted(histogram)
    shares = [histogram[d] for d in depths]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar([str(d) for d in depths], shares, color="#4878a8")
    ax.set_xlabel("semantic depth")
    ax.set_ylabel("share of queries (%)")
    ax.set_ylim(0, 100)
    ax.set_title("Semantic depth distribution")
    for index, share in enumerate(shares):
        if share > 0:
            ax.annotate(
                f"{share:.0f}%",
                (index, share),
                ha="center",
                va="bottom",
                fontsize=8,
            )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def run_eval(
    engine: Engine,
    qa_path: str | Path,
    judge: bool = False,
    use_diffusion: bool = True,
    out_dir: str | Path | None = None,
) -> EvalReport:
    """Score every QA record and optionally write the report files."""
    qa_records = load_qa(qa_path)
    ledger = engine.gateway.ledger
    ledger_before = ledger.total

    records: list[EvalRecord] = []
    judge_failures = 0
    for row in qa_records:
        record = EvalRecord(question=row["question"], golds=row["answers"])
        records.append(record)
        tokens_before = ledger.total
        try:
            result = engine.query(row["question"], use_diffusion=use_diffusion)
        except GatewayError as exc:
            record.tokens = ledger.total - tokens_before
            record.error = f"gateway: {exc}"
            logger.error("query failed for %r: %s", row["question"], exc)
            continue
        record.predicted = result.answer.answer
        record.depth_used = result.depth_used
        if judge:
            gold = " | ".join(row["answers"])
            try:
                scores = judge_score(
                    row["question"], gold, record.predicted, engine.gateway
                )
            except (JudgeFailure, GatewayError) as exc:
                judge_failures += 1
                record.tokens = ledger.total - tokens_before
                record.error = f"judge: {exc}"
                logger.error("judge failed for %r: %s", row["question"], exc)
                continue
            record.em = scores.em
            record.f1 = scores.f1
        else:
            scores = short_form_score(record.predicted, record.golds)
            record.em = float(scores.em)
            record.f1 = scores.f1
        record.tokens = ledger.total - tokens_before

    scored = [r for r in records if not r.error]
    failed = len(records) - len(scored)
    em_mean = sum(r.em for r in scored) / len(scored) if scored else 0.0
    f1_mean = sum(r.f1 for r in scored) / len(scored) if scored else 0.0
    ledger_tokens = ledger.total - ledger_before
    avg_tokens = ledger_tokens / len(records) if records else 0.0
    histogram = _depth_histogram(records)

    report = EvalReport(
        records=records,
        em_mean=em_mean,
        f1_mean=f1_mean,
        avg_tokens=avg_tokens,
        depth_histogram=histogram,
        total=len(records),
        failed=failed,
        judge_failures=judge_failures,
        ledger_tokens=ledger_tokens,
    )
    if out_dir is not None:
        write_report(report, Path(out_dir))
    return report


def write_report(report: EvalReport, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    report.out_dir = out_dir

    json_path = out_dir / REPORT_FILE
    payload = {
        "em_mean": report.em_mean,
        "f1_mean": report.f1_mean,
        "avg_tokens": report.avg_tokens,
        "depth_histogram": {str(k): v for k, v in report.depth_histogram.items()},
        "total": report.total,
        "failed": report.failed,
        "judge_failures": report.judge_failures,
        "ledger_tokens": report.ledger_tokens,
        "records": [r.to_row() for r in report.records],
    }
    json_path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )

    csv_path = out_dir / RECORDS_FILE
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for record in report.records:
            writer.writerow(record.to_row())

    figure_path = out_dir / HISTOGRAM_FILE
    _render_histogram(report.depth_histogram, figure_path)
    report.files = {
        "report": json_path,
        "records": csv_path,
        "histogram": figure_path,
    }
