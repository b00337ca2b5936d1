import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))


@pytest.fixture(scope="session")
def table():
    from application.sieve import build_prime_table

    return build_prime_table(400_000, segment_size=2**16)


@pytest.fixture(scope="session")
def small_table():
    from application.sieve import build_prime_table

    return build_prime_table(10_000)
