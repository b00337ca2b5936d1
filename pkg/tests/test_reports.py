import json
from pathlib import Path

from domain.models import ReportEnvelope
from infrastructure.reports import (
    ReportWriter,
    build_envelope,
    render_csv,
    render_json,
    results_checksum,
)
from infrastructure.storage import Ledger


def _envelope() -> ReportEnvelope:
    results = [
        {"kind": "prime_count", "x": 100, "value": 25, "status": "report-only"},
        {"kind": "nth_prime", "n": 4, "value": 7, "status": "mismatch", "details": {"b": 1}},
    ]
    return build_envelope("primes", {"count": [100]}, results, {"total_seconds": 0.5})


def test_checksum_ignores_key_order_and_timings() -> None:
    envelope = _envelope()
    reordered = [dict(reversed(list(result.items()))) for result in envelope.results]
    assert results_checksum(reordered) == envelope.checksum
    untimed = build_envelope("primes", {"count": [100]}, envelope.results)
    assert untimed.checksum == envelope.checksum


def test_json_and_csv_rendering() -> None:
    envelope = _envelope()
    payload = json.loads(render_json(envelope))
    assert payload["schema_version"] == "1"
    assert payload["results"][1]["value"] == 7
    lines = render_csv(envelope).splitlines()
    assert lines[0] == "kind,x,n,value,status"
    assert lines[1] == "prime_count,100,,25,report-only"
    assert lines[2] == "nth_prime,,4,7,mismatch"


def test_writer_archives_with_latest_pointer(tmp_path) -> None:
    writer = ReportWriter(str(tmp_path / "reports"))
    out = tmp_path / "out" / "primes.csv"
    text = writer.write(_envelope(), fmt="csv", out=out)
    assert out.read_text(encoding="utf-8") == text
    pointer = json.loads((tmp_path / "reports" / "latest.json").read_text(encoding="utf-8"))
    assert pointer["checksum"] == _envelope().checksum
    archived = ReportEnvelope.model_validate_json(Path(pointer["path"]).read_text(encoding="utf-8"))
    assert archived.has_findings


def test_ledger_records_findings(tmp_path) -> None:
    ledger = Ledger(f"sqlite:///{tmp_path}/ledger/runs.db")
    ledger.init_db()
    run_id = ledger.record_run(_envelope())
    history = ledger.history()
    assert [entry["id"] for entry in history] == [run_id]
    entry = history[0]
    assert entry["run_status"] == "findings"
    assert entry["findings_count"] == 1
    assert entry["findings"][0]["payload"]["kind"] == "nth_prime"
