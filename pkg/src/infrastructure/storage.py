from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

from sqlalchemy import (
    JSON,
    Column,
    DateTime,
    ForeignKey,
    Integer,
    String,
    create_engine,
    select,
)
from sqlalchemy.engine import make_url
from sqlalchemy.orm import Session, declarative_base, relationship

from domain.models import FINDING_STATUSES, ReportEnvelope

Base = declarative_base()


class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String(32), nullable=False)
    params = Column(JSON, nullable=False)
    checksum = Column(String(64), nullable=False)
    status = Column(String(16), nullable=False)
    findings_count = Column(Integer, nullable=False, default=0)
    created_at = Column(DateTime(timezone=True), default=lambda: datetime.now(timezone.utc))

    findings = relationship("FindingRecord", back_populates="run", cascade="all, delete-orphan")


class FindingRecord(Base):
    __tablename__ = "findings"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("runs.id"), nullable=False)
    status = Column(String(32), nullable=False)
    payload = Column(JSON, nullable=False)

    run = relationship("RunRecord", back_populates="findings")


class Ledger:
    """Run history: one row per command run, one per non-clean result."""

    def __init__(self, database_url: str) -> None:
        url = make_url(database_url)
        if url.get_backend_name() == "sqlite" and url.database not in (None, "", ":memory:"):
            Path(url.database).parent.mkdir(parents=True, exist_ok=True)
        self.engine = create_engine(database_url, future=True)

    def init_db(self) -> None:
        Base.metadata.create_all(self.engine)

    def record_run(self, envelope: ReportEnvelope) -> int:
        findings = [r for r in envelope.results if r.get("status") in FINDING_STATUSES]
        with Session(self.engine) as session:
            run = RunRecord(
                command=envelope.command,
                params=envelope.params,
                checksum=envelope.checksum,
                status="findings" if findings else "clean",
                findings_count=len(findings),
            )
            run.findings = [FindingRecord(status=r["status"], payload=r) for r in findings]
            session.add(run)
            session.commit()
            return int(run.id)

    def history(self, limit: int = 20) -> list[dict]:
        with Session(self.engine) as session:
            stmt = select(RunRecord).order_by(RunRecord.id.desc()).limit(limit)
            runs = session.execute(stmt).scalars().all()
            return [self._run_to_dict(run) for run in runs]

    def _run_to_dict(self, run: RunRecord) -> dict:
        return {
            "kind": "ledger_run",
            "id": run.id,
            "command": run.command,
            "params": run.params,
            "checksum": run.checksum,
            "status": "report-only",
            "run_status": run.status,
            "findings_count": run.findings_count,
            "created_at": run.created_at.isoformat() if run.created_at else None,
            "findings": [
                {"status": finding.status, "payload": finding.payload} for finding in run.findings
            ],
        }
