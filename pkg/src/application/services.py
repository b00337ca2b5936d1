from __future__ import annotations

import logging
import time
from collections.abc import Callable
from typing import Any

from pydantic import BaseModel

from application import bounds, folding, goldbach, identities, intervals
from application.sieve import PrimeTable, build_prime_table, nth_prime, prime_count
from domain.errors import DomainError
from domain.models import BoundReport, IdentityReport, ReportEnvelope, RunConfig, Selection
from infrastructure.reports import build_envelope
from infrastructure.settings import Settings
from infrastructure.storage import Ledger

logger = logging.getLogger(__name__)

Row = dict[str, Any]

PRINTED_PRIME_FACTS = (
    ("prime_count", {"x": 355_991}, 30_456),
    ("nth_prime", {"n": 30_456}, 355_969),
    ("nth_prime", {"n": 30_457}, 356_023),
)
FALSIFICATION_LEDGER = (
    ("BM", {"values": (2, 3, 5, 7), "s": 6, "t": 2}),
    ("MAB", {"n": 2, "subset": (3,), "b": 5, "chosen": (1, 2)}),
)
DOCUMENTED_IDENTITIES = (
    ("BN", {"values": (2, 3, 5, 7), "s": 2}),
    ("BN", {"values": (2, 3, 5, 7), "s": 0}),
    ("BN", {"values": (2, 3), "s": 6}),
    ("BM", {"values": (2, 3), "s": 6, "t": 2}),
    ("CAP", {"n": 2, "subset": (2,), "b": 5}),
    ("CAP", {"n": 2, "subset": (3,), "b": 7}),
    ("CAP", {"n": 2, "subset": (), "b": 5}),
    ("MAB", {"n": 2, "subset": (3,), "b": 5, "chosen": (1,)}),
    ("MAB", {"n": 1, "subset": (), "b": 3, "chosen": (1,)}),
    *FALSIFICATION_LEDGER,
)
BOUND_QUANTITIES = (
    "hi",
    "hi-scan",
    "q",
    "q-scan",
    "v",
    "v-check",
    "j",
    "theta",
    "euler",
    "mertens",
    "nicolas",
    "u",
    "theorem3",
    "theorem4",
    "olq",
    "pmt",
    "zir",
)


def bound_row(report: BoundReport) -> Row:
    """Flatten a BoundReport so CSV projections can pick params and details by name."""
    row = report.model_dump(mode="json")
    row["kind"] = report.quantity
    for source in (report.params, report.details):
        for key, value in source.items():
            row.setdefault(key, value)
    return row


def model_row(kind: str, model: BaseModel, status: str = "report-only") -> Row:
    row = model.model_dump(mode="json")
    row["kind"] = kind
    row["status"] = status
    return row


def identity_row(report: IdentityReport) -> Row:
    row = report.model_dump(mode="json")
    row["kind"] = "identity"
    row["status"] = report.status
    return row


def run_identity(lemma: str, instance: dict[str, Any], table: PrimeTable, budget: int) -> Row:
    if lemma == "BN":
        report = identities.bn_check(instance["values"], instance["s"], table, budget)
    elif lemma == "BM":
        report = identities.bm_check(
            instance["values"], instance["s"], instance["t"], table, budget
        )
    elif lemma == "CAP":
        report = identities.cap_check(
            instance["n"], instance["subset"], instance["b"], table, budget
        )
    elif lemma == "MAB":
        report = identities.mab_check(
            instance["n"], instance["subset"], instance["b"], instance["chosen"], table, budget
        )
    else:
        raise DomainError(f"Unknown lemma {lemma!r}")
    return identity_row(report)


class VerificationService:
    def __init__(self, settings: Settings, ledger: Ledger | None = None) -> None:
        self.settings = settings
        self.ledger = ledger
        self._tables: dict[int, PrimeTable] = {}
        self._threads = 1
        self._timings: dict[str, float] = {}

    def table(self, limit: int | None = None) -> PrimeTable:
        size = max(limit or 0, self.settings.table_limit)
        for built, table in self._tables.items():
            if built >= size:
                return table
        table = build_prime_table(size, self.settings.segment_size, self._threads)
        self._tables[size] = table
        return table

    def run(self, config: RunConfig) -> ReportEnvelope:
        handler: Callable[[RunConfig], list[Row]] = getattr(self, f"_run_{config.command}")
        self._threads = config.threads
        self._timings = {}
        started = time.perf_counter()
        results = handler(config)
        timings = (
            {"total_seconds": round(time.perf_counter() - started, 6), **self._timings}
            if config.include_timings
            else {}
        )
        envelope = build_envelope(config.command, config.params, results, timings)
        logger.info(
            "run_finished",
            extra={
                "command": config.command,
                "results": len(results),
                "findings": envelope.has_findings,
                "checksum": envelope.checksum,
            },
        )
        if self.ledger is not None and not config.params.get("history"):
            self.ledger.record_run(envelope)
        return envelope

    def _run_primes(self, config: RunConfig) -> list[Row]:
        params = config.params
        table = self.table(params.get("limit"))
        rows: list[Row] = [
            {
                "kind": "prime_table",
                "x": table.limit,
                "value": len(table),
                "status": "report-only",
            }
        ]
        for n in params.get("nth") or []:
            rows.append(
                {"kind": "nth_prime", "n": n, "value": nth_prime(n, table), "status": "report-only"}
            )
        for x in params.get("count") or []:
            rows.append(
                {
                    "kind": "prime_count",
                    "x": x,
                    "value": prime_count(x, table),
                    "status": "report-only",
                }
            )
        return rows

    def _run_theorem1(self, config: RunConfig) -> list[Row]:
        params = config.params
        n_lo, n_hi = params.get("n_lo", 4), params.get("n_hi", 200)
        p_hi = nth_prime(n_hi, self.table())
        table = self.table(p_hi * p_hi)
        records = intervals.ratio_scan(
            n_lo, n_hi, table, config.threads, base=params.get("base", 1)
        )
        rows = [
            model_row("discrepancy", record, "pass" if record.within_bound else "falsification")
            for record in records
        ]
        if params.get("study"):
            rows.append(bound_row(intervals.log2_study(records)))
        samples = params.get("samples", 0)
        if samples:
            for primes, record in intervals.theorem1_sample(
                samples, config.seed, table, threads=config.threads
            ):
                row = model_row(
                    "theorem1_sample", record, "pass" if record.within_bound else "falsification"
                )
                row["primes"] = list(primes)
                rows.append(row)
        return rows

    def _run_fold(self, config: RunConfig) -> list[Row]:
        params = config.params
        i, n, r = params["i"], params["n"], params["r"]
        table = self.table()
        rows = [model_row("folded_count", folding.folded_count(i, n, r, table))]
        if params.get("selections"):
            for sel in folding.enumerate_selections(i, n, r, table):
                rows.append(
                    {
                        "kind": "selection",
                        "i": i,
                        "n": n,
                        "r": r,
                        "choices": list(sel.choices),
                        "union_size": folding.selection_union_size(sel),
                        "status": "report-only",
                    }
                )
            rows.append(bound_row(folding.union_identity(i, n, r, table, config.threads)))
            rows.append(bound_row(folding.fold_symmetry(i, n, r, table)))
        return rows

    def _run_shift(self, config: RunConfig) -> list[Row]:
        params = config.params
        j, n, r = params["j"], params["n"], params["r"]
        table = self.table()
        choices = params.get("choices")
        if choices:
            primes = tuple(table.prime_list(n))
            selections = [
                Selection(n=n, r=r, primes=primes, choices=tuple(choices), lo=1, hi=j)
            ]
        else:
            selections = folding.enumerate_selections(j, n, r, table, enforce_host=False)
        return [bound_row(folding.shift_check(j, sel)) for sel in selections]

    def _run_twin(self, config: RunConfig) -> list[Row]:
        params = config.params
        limit = params.get("limit", 10**6)
        table = self.table(limit)
        count = folding.twin_pair_count(limit, table)
        rows: list[Row] = []
        if params.get("oracle"):
            oracle = folding.twin_pair_count_oracle(limit)
            rows.append(
                {
                    "kind": "twin_pair_count",
                    "limit": limit,
                    "value": count,
                    "oracle": oracle,
                    "status": "match" if oracle == count else "mismatch",
                }
            )
        else:
            rows.append(
                {"kind": "twin_pair_count", "limit": limit, "value": count, "status": "report-only"}
            )
        n = params.get("n")
        if n:
            p_n = nth_prime(n, table)
            i = min(params.get("i") or p_n * p_n, p_n * p_n)
            rows.append(bound_row(folding.twin_correspondence(n, i, self.table(i))))
        return rows

    def _run_goldbach(self, config: RunConfig) -> list[Row]:
        params = config.params
        rows: list[Row] = []
        if params.get("range"):
            lo, hi = params["range"]
            report = goldbach.goldbach_verify_range(
                lo, hi, self.settings.goldbach_block, config.threads, timings=self._timings
            )
            rows.append(bound_row(report))
        target = params.get("target")
        if target:
            table = self.table(target)
            count = folding.goldbach_representations(target, table)
            row: Row = {
                "kind": "goldbach_representations",
                "target": target,
                "value": count,
                "status": "report-only",
            }
            if params.get("oracle"):
                oracle = folding.goldbach_representations_oracle(target)
                row["oracle"] = oracle
                row["status"] = "match" if oracle == count else "mismatch"
            rows.append(row)
        if params.get("z") and params.get("n"):
            z = params["z"]
            rows.append(
                bound_row(folding.goldbach_correspondence(params["n"], z, self.table(2 * z)))
            )
        if not rows:
            raise DomainError("goldbach needs --range, --target or --z with --n")
        return rows

    def _run_identities(self, config: RunConfig) -> list[Row]:
        params = config.params
        table = self.table()
        budget = params.get("max_period") or self.settings.identity_period_budget
        lemma = params.get("lemma")
        if params.get("sweep"):
            limit = params.get("max_period") or self.settings.sweep_period_limit
            lemmas = [lemma] if lemma in ("BN", "CAP") else ["BN", "CAP"]
            rows: list[Row] = []
            for name in lemmas:
                reports = identities.sweep(
                    name,
                    table,
                    seed=config.seed,
                    count=params.get("instances") or self.settings.sweep_instances,
                    limit=limit,
                    threads=config.threads,
                    segment_size=self.settings.segment_size,
                )
                rows.extend(identity_row(report) for report in reports)
            return rows
        if lemma:
            instance = {
                "values": params.get("J") or (),
                "s": params.get("s", 0),
                "t": params.get("t", 2),
                "n": params.get("n", 1),
                "subset": params.get("V") or (),
                "b": params.get("b", 0),
                "chosen": params.get("S") or (),
            }
            return [run_identity(lemma, instance, table, budget)]
        return [run_identity(name, inst, table, budget) for name, inst in DOCUMENTED_IDENTITIES]

    def _run_bounds(self, config: RunConfig) -> list[Row]:
        which = config.params.get("which", "all")
        names = BOUND_QUANTITIES if which == "all" else (which,)
        rows: list[Row] = []
        for name in names:
            rows.extend(self._bound(name, config.params))
        return rows

    def _bound(self, name: str, params: dict[str, Any]) -> list[Row]:
        table = self.table()
        if name == "hi":
            x = params.get("x") or bounds.DUSART_START
            value = bounds.dusart_hi(x)
            if x == bounds.DUSART_START:
                report = bounds.printed_check("hi", value, bounds.PRINTED_HI_START, 1e-3, {"x": x})
            else:
                report = BoundReport(quantity="hi", params={"x": x}, value=value)
            return [bound_row(report)]
        if name == "hi-scan":
            grid = range(bounds.DUSART_START, 10**7 + 1, 100_000)
            return [bound_row(bounds.hi_ratio_scan(grid))]
        if name == "q":
            r = params.get("r") or bounds.DUSART_START
            value = bounds.q_of(r)
            if r == bounds.DUSART_START:
                report = bounds.printed_check("q", value, bounds.PRINTED_Q[0], 1e-2, {"r": r})
            else:
                report = BoundReport(quantity="q", params={"r": r}, value=value)
            return [bound_row(report)]
        if name == "q-scan":
            return [bound_row(bounds.q_increment_scan(range(356_000, 10**6 + 1, 64_000)))]
        if name == "v":
            c = params.get("c") or bounds.V_SWITCH
            value = bounds.v_value(c, table)
            if c == bounds.V_SWITCH:
                report = bounds.printed_check("v", value, bounds.PRINTED_V_SWITCH, 1e-2, {"c": c})
            else:
                report = BoundReport(quantity="v", params={"c": c}, value=value)
            return [bound_row(report)]
        if name == "v-check":
            return [bound_row(bounds.v_sequence_check(bounds.V_SWITCH, bounds.V_SWITCH + 200, table))]
        if name == "j":
            k = params.get("k") or bounds.V_SWITCH
            return [
                bound_row(BoundReport(quantity="j", params={"k": k}, value=bounds.j_of(k)))
            ]
        if name == "theta":
            x = params.get("x") or nth_prime(bounds.V_SWITCH - 1, table)
            value = bounds.theta_of(x, self.table(int(x)))
            return [bound_row(BoundReport(quantity="theta", params={"x": x}, value=value))]
        if name == "euler":
            n = params.get("n") or 4
            return [model_row("euler_products", bounds.euler_products(n, table))]
        if name == "mertens":
            big = self.table(self.settings.mertens_limit)
            n = params.get("n") or prime_count(self.settings.mertens_limit, big)
            return [bound_row(bounds.mertens_convergence(n, big))]
        if name == "nicolas":
            k = params.get("k") or 5000
            report = bounds.nicolas_sweep(k, table)
            report.details["ratio_at_k_max"] = bounds.nicolas_ratio(k, table)
            return [bound_row(report)]
        if name == "u":
            j, n, c = params.get("j") or 17, params.get("n") or 4, params.get("c") or 1
            value = bounds.u_of(j, n, c, table)
            split = bounds.u_of_split(j, n, c, table)
            report = BoundReport(
                quantity="u",
                params={"j": j, "n": n, "c": c},
                value=value,
                status="match" if abs(value - split) <= 1e-12 * max(1.0, abs(value)) else "mismatch",
                details={"rearranged": split},
            )
            return [bound_row(report)]
        if name == "theorem3":
            n = params.get("n") or 5
            z = params.get("z") or 61
            table_z = self.table(2 * z)
            s = params.get("s")
            if s is None:
                s = -table_z.pi(z) / z + bounds.mertens(n, table_z)
            result = bounds.theorem3_check(z, n, s, table_z)
            return [model_row("theorem3", result)]
        if name == "theorem4":
            path = bounds.theorem4_path(table)
            return [
                bound_row(bounds.theorem4_constant(table)),
                *(bound_row(report) for report in bounds.theorem4_components()),
                model_row("theorem4_path", path, "match" if path.passes else "mismatch"),
            ]
        if name == "olq":
            n = params.get("n") or bounds.V_SWITCH
            return [bound_row(bounds.olq_ratio(n, table)), bound_row(bounds.olq_ratio(n + 1, table))]
        if name == "pmt":
            reports = bounds.pmt_ratios(table)
            reports.append(bounds.pmt_monotone_ratios(bounds.V_SWITCH, bounds.V_SWITCH + 50, table))
            return [bound_row(report) for report in reports]
        if name == "zir":
            n = params.get("n") or 4
            i = params.get("i") or nth_prime(n, table) ** 2
            report = bounds.zir_upper_bound(i, n, table, params.get("j_n"))
            actual = folding.folded_count(i, n, 2, table).noncoprime_count
            report.details["folded_noncoprime"] = actual
            return [bound_row(report)]
        raise DomainError(f"Unknown bound quantity {name!r}")

    def _run_report(self, config: RunConfig) -> list[Row]:
        if config.params.get("history"):
            if self.ledger is None:
                raise DomainError("The run ledger is disabled")
            return self.ledger.history(config.params.get("limit") or 20)
        table = self.table()
        rows: list[Row] = []
        for kind, args, expected in PRINTED_PRIME_FACTS:
            value = prime_count(args["x"], table) if kind == "prime_count" else nth_prime(
                args["n"], table
            )
            rows.append(
                {
                    "kind": kind,
                    **args,
                    "value": value,
                    "paper_value": expected,
                    "status": "match" if value == expected else "mismatch",
                }
            )
        rows.extend(bound_row(report) for report in bounds.constant_reproduction(table))
        rows.extend(self._bound("theorem4", {}))
        rows.extend(self._bound("olq", {}))
        rows.extend(self._bound("q-scan", {}))
        budget = self.settings.identity_period_budget
        rows.extend(run_identity(name, inst, table, budget) for name, inst in FALSIFICATION_LEDGER)
        return rows
