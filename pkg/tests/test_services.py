import numpy as np

from application import services as services_module
from application.services import VerificationService
from domain.models import RunConfig
from infrastructure.settings import Settings


def _service() -> VerificationService:
    settings = Settings(table_limit=20_000, segment_size=4_096, ledger_enabled=False)
    return VerificationService(settings)


def test_table_build_uses_run_threads(monkeypatch) -> None:
    calls = []
    build = services_module.build_prime_table

    def recording(limit, segment_size, threads=1):
        calls.append((limit, threads))
        return build(limit, segment_size, threads)

    monkeypatch.setattr(services_module, "build_prime_table", recording)
    service = _service()
    envelope = service.run(RunConfig(command="primes", params={"count": [100]}, threads=4))
    assert calls == [(20_000, 4)]
    assert envelope.results[-1]["value"] == 25

    serial = _service().table()
    assert np.array_equal(service.table().primes, serial.primes)


def test_goldbach_throughput_only_with_timings() -> None:
    service = _service()
    params = {"range": [4, 2_000]}
    timed = service.run(RunConfig(command="goldbach", params=params, include_timings=True))
    assert timed.timings["goldbach_targets_per_second"] > 0
    assert {"total_seconds", "goldbach_seconds"} <= set(timed.timings)

    plain = service.run(RunConfig(command="goldbach", params=params))
    assert plain.timings == {}
    assert plain.checksum == timed.checksum
