import math

import pytest

from application.roots import expand_bracket, newton_bisect
from domain.errors import NumericError


def test_newton_bisect_finds_square_root() -> None:
    root = newton_bisect(lambda x: x * x - 2.0, lambda x: 2.0 * x, 0.0, 2.0)
    assert root == pytest.approx(math.sqrt(2.0), rel=1e-12)


def test_newton_bisect_handles_decreasing_function() -> None:
    root = newton_bisect(lambda x: 1.0 - x**3, lambda x: -3.0 * x * x, 0.0, 5.0)
    assert root == pytest.approx(1.0, rel=1e-12)


def test_newton_bisect_requires_bracket() -> None:
    with pytest.raises(NumericError):
        newton_bisect(lambda x: x * x + 1.0, lambda x: 2.0 * x, -1.0, 1.0)


def test_expand_bracket_grows_upper_end() -> None:
    lo, hi = expand_bracket(lambda x: x - 1_000.0, 0.0, 1.0)
    assert lo == 0.0
    assert hi >= 1_000.0


def test_expand_bracket_gives_up() -> None:
    with pytest.raises(NumericError):
        expand_bracket(lambda x: 1.0, 0.0, 1.0, max_doublings=5)
