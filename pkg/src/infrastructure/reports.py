from __future__ import annotations

import csv
import hashlib
import io
import json
import sys
from pathlib import Path
from typing import Any, TextIO

from domain.models import ReportEnvelope

CSV_COLUMNS: dict[str, list[str]] = {
    "primes": ["kind", "x", "n", "value", "status"],
    "theorem1": ["n", "i", "k", "discrepancy", "bound", "ratio", "status"],
    "fold": ["kind", "i", "n", "r", "coprime_count", "noncoprime_count", "status"],
    "shift": ["kind", "j", "n", "r", "choices", "i_T", "status"],
    "twin": ["kind", "limit", "n", "i", "value", "status"],
    "goldbach": ["kind", "target", "lo", "hi", "value", "status"],
    "identities": ["lemma_id", "params", "brute_count", "formula_value", "matches", "status"],
    "bounds": ["quantity", "params", "value", "paper_value", "deviation", "tolerance", "status"],
    "report": ["kind", "quantity", "value", "paper_value", "deviation", "status"],
}
DEFAULT_COLUMNS = ["kind", "value", "status"]


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def results_checksum(results: list[dict[str, Any]]) -> str:
    return hashlib.sha256(canonical_json(results).encode("ascii")).hexdigest()


def build_envelope(
    command: str,
    params: dict[str, Any],
    results: list[dict[str, Any]],
    timings: dict[str, float] | None = None,
) -> ReportEnvelope:
    return ReportEnvelope(
        command=command,
        params=params,
        results=results,
        timings=timings or {},
        checksum=results_checksum(results),
    )


def render_json(envelope: ReportEnvelope) -> str:
    payload = envelope.model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (dict, list)):
        return canonical_json(value)
    return str(value)


def render_csv(envelope: ReportEnvelope) -> str:
    """Fixed-column projection of the results array; JSON stays canonical."""
    columns = CSV_COLUMNS.get(envelope.command, DEFAULT_COLUMNS)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for result in envelope.results:
        writer.writerow([_cell(result.get(column)) for column in columns])
    return buffer.getvalue()


class ReportWriter:
    def __init__(self, report_dir: str | None = None) -> None:
        self.base_path = Path(report_dir) if report_dir else None

    def write(
        self,
        envelope: ReportEnvelope,
        fmt: str = "json",
        out: Path | None = None,
        stream: TextIO | None = None,
    ) -> str:
        text = render_csv(envelope) if fmt == "csv" else render_json(envelope)
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
        else:
            (stream or sys.stdout).write(text)
        if self.base_path is not None:
            self.archive(envelope)
        return text

    def archive(self, envelope: ReportEnvelope) -> Path:
        self.base_path.mkdir(parents=True, exist_ok=True)
        path = self.base_path / f"{envelope.command}_{envelope.checksum[:12]}.json"
        text = render_json(envelope)
        path.write_text(text, encoding="utf-8")
        latest = {"command": envelope.command, "checksum": envelope.checksum, "path": str(path)}
        with open(self.base_path / "latest.json", "w", encoding="utf-8") as handle:
            json.dump(latest, handle, ensure_ascii=True, indent=2)
        return path

