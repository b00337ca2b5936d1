from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from domain.formatting import format_fraction

Status = Literal[
    "match",
    "mismatch",
    "report-only",
    "pass",
    "falsification",
    "paper claim unreproduced",
]
FINDING_STATUSES = frozenset({"mismatch", "falsification", "paper claim unreproduced"})
Command = Literal[
    "primes",
    "theorem1",
    "fold",
    "shift",
    "twin",
    "goldbach",
    "identities",
    "bounds",
    "report",
]


class IntervalSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    lo: int
    hi: int
    prime_set: tuple[int, ...] = ()

    @model_validator(mode="after")
    def check_bounds(self) -> IntervalSpec:
        if self.lo > self.hi:
            raise ValueError(f"Empty interval [{self.lo}, {self.hi}]")
        if len(set(self.prime_set)) != len(self.prime_set):
            raise ValueError("prime_set elements must be distinct")
        return self

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


class DiscrepancyRecord(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int
    i: int
    k: int
    discrepancy: int
    bound: Fraction
    ratio: float

    @field_serializer("bound")
    def serialize_bound(self, value: Fraction) -> str:
        return format_fraction(value)

    @property
    def within_bound(self) -> bool:
        return self.discrepancy <= self.bound


class Selection(BaseModel):
    """One member of R([lo, hi], n, r): a residue choice s_p in {0, r} per prime."""

    model_config = ConfigDict(frozen=True)

    n: int
    r: int
    primes: tuple[int, ...]
    choices: tuple[int, ...]
    lo: int = 1
    hi: int

    @model_validator(mode="after")
    def check_choices(self) -> Selection:
        if self.r % 2:
            raise ValueError(f"Fold parameter r must be even, got {self.r}")
        if len(self.primes) != self.n or len(self.choices) != self.n:
            raise ValueError("Selection needs exactly one choice per prime in P(n)")
        if any(choice not in (0, self.r) for choice in self.choices):
            raise ValueError(f"Choices must lie in {{0, {self.r}}}")
        if self.lo > self.hi:
            raise ValueError("Selection host interval is empty")
        return self

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


class FoldedCountRecord(BaseModel):
    i: int
    n: int
    r: int
    coprime_count: int
    noncoprime_count: int

    @model_validator(mode="after")
    def check_total(self) -> FoldedCountRecord:
        if self.coprime_count + self.noncoprime_count != self.i:
            raise ValueError("coprime and non-coprime counts must partition the interval")
        return self


class IdentityReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lemma_id: Literal["BN", "BM", "CAP", "MAB"]
    params: dict[str, Any]
    brute_count: int = Field(ge=0)
    formula_value: Fraction
    matches: bool
    checks: dict[str, bool] = Field(default_factory=dict)
    quantities: dict[str, str] = Field(default_factory=dict)

    @field_serializer("formula_value")
    def serialize_formula(self, value: Fraction) -> str:
        return format_fraction(value)

    @model_validator(mode="after")
    def check_matches(self) -> IdentityReport:
        if not self.checks and self.matches != (self.formula_value == self.brute_count):
            raise ValueError("matches must agree with exact formula/brute equality")
        return self

    @property
    def status(self) -> str:
        return "match" if self.matches else "mismatch"


class EulerProducts(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int
    mertens: float
    twin_factor: float
    combined: float
    mertens_exact: Fraction | None = None
    twin_factor_exact: Fraction | None = None

    @field_serializer("mertens_exact", "twin_factor_exact")
    def serialize_exact(self, value: Fraction | None) -> str | None:
        return None if value is None else format_fraction(value)


class GoldbachBound(BaseModel):
    z: int
    n: int
    s: float
    u: float
    lhs: float
    lhs_literal: float
    znz_bound: float
    passes: bool
    floor: float | None = None
    floor_checked: bool = True
    representations: int | None = None

    @model_validator(mode="after")
    def check_passes(self) -> GoldbachBound:
        if self.passes != (self.lhs >= 1.0):
            raise ValueError("passes must equal lhs >= 1")
        return self


class BoundReport(BaseModel):
    quantity: str
    params: dict[str, Any] = Field(default_factory=dict)
    value: float | None = None
    paper_value: float | None = None
    deviation: float | None = None
    tolerance: float | None = None
    status: Status = "report-only"
    details: dict[str, Any] = Field(default_factory=dict)


class RunConfig(BaseModel):
    command: Command
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0, lt=2**64)
    out: Path | None = None
    format: Literal["json", "csv"] = "json"
    threads: int = Field(default=1, ge=1)
    include_timings: bool = False


class ReportEnvelope(BaseModel):
    schema_version: str = "1"
    command: str
    params: dict[str, Any]
    results: list[dict[str, Any]]
    timings: dict[str, float] = Field(default_factory=dict)
    checksum: str = ""

    @property
    def has_findings(self) -> bool:
        return any(result.get("status") in FINDING_STATUSES for result in self.results)
