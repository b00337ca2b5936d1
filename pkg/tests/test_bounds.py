import math
from fractions import Fraction

import pytest

from application.bounds import (
    E_GAMMA,
    E_NEG_GAMMA,
    V_SWITCH,
    constant_reproduction,
    dusart_hi,
    euler_products,
    hi_inverse,
    hi_ratio_scan,
    j_of,
    mertens_convergence,
    nicolas_ratio,
    nicolas_sweep,
    olq_ratio,
    pmt_monotone_ratios,
    pmt_ratios,
    q_increment_scan,
    q_of,
    theorem3_check,
    theorem4_components,
    theorem4_constant,
    theorem4_path,
    theta_of,
    u_of,
    u_of_split,
    v_sequence_check,
    v_value,
    zir_upper_bound,
)
from application.sieve import nth_prime
from domain.errors import DomainError


def test_gamma_constants() -> None:
    assert E_GAMMA == pytest.approx(1.781072418, rel=1e-9)
    assert 2 * E_NEG_GAMMA == pytest.approx(1.12292, abs=1e-5)


def test_hi_and_its_inverse() -> None:
    assert dusart_hi(10) == pytest.approx(8.2851, abs=1e-3)
    assert dusart_hi(355_991) == pytest.approx(30_456.026, abs=1e-3)
    assert hi_inverse(dusart_hi(400_000.0)) == pytest.approx(400_000.0, rel=1e-12)
    with pytest.raises(DomainError):
        dusart_hi(1)
    with pytest.raises(DomainError):
        hi_inverse(5)


def test_q_iterates() -> None:
    first = q_of(355_991)
    # the printed 356003.80 is 0.011 away
    assert first == pytest.approx(356_003.788868, abs=1e-5)
    assert abs(first - 356_003.80) > 1e-2
    assert q_of(first) == pytest.approx(356_016.58, abs=1e-2)
    with pytest.raises(DomainError):
        q_of(355_990)


@pytest.mark.parametrize("r", [355_991, 356_003.788868, 400_000, 1_234_567.5, 5_000_000])
def test_q_steps_hi_by_one(r: float) -> None:
    q = q_of(r)
    assert q > r
    assert dusart_hi(q) - dusart_hi(r) == pytest.approx(1.0, abs=1e-9)


def test_upper_branch_root() -> None:
    assert j_of(V_SWITCH) == pytest.approx(392_277.800878, abs=1e-3)
    assert j_of(V_SWITCH + 1) == pytest.approx(392_291.764798, abs=1e-3)
    y = j_of(50.0)
    assert y / math.log(y) == pytest.approx(50.0, rel=1e-12)
    assert j_of(math.e) == math.e
    with pytest.raises(DomainError):
        j_of(2.0)


def test_v_switches_from_primes_to_roots(table) -> None:
    assert v_value(V_SWITCH - 1, table) == nth_prime(V_SWITCH - 1, table)
    assert v_value(V_SWITCH, table) == pytest.approx(356_003.456, abs=1e-2)
    assert v_value(V_SWITCH, table) < nth_prime(V_SWITCH, table)


def test_theta(table) -> None:
    assert theta_of(10, table) == pytest.approx(math.log(210))
    assert theta_of(nth_prime(V_SWITCH - 1, table), table) == pytest.approx(
        355_672.892056, abs=1e-5
    )
    assert theta_of(nth_prime(V_SWITCH, table), table) == pytest.approx(355_685.674752, abs=1e-3)


def test_euler_products_exact(table) -> None:
    products = euler_products(4, table)
    assert products.mertens_exact == Fraction(8, 35)
    assert products.twin_factor_exact == Fraction(5, 16)
    assert products.combined == pytest.approx(8 / 35 * 5 / 16)
    large = euler_products(500, table)
    assert large.mertens_exact is None
    assert large.mertens == pytest.approx(math.prod(1 - 1 / p for p in table.prime_list(500)))


def test_mertens_product_converges(table) -> None:
    assert mertens_convergence(len(table), table).status == "match"


def test_nicolas_ratios(table) -> None:
    assert nicolas_ratio(2, table) == pytest.approx(5.14405, abs=1e-4)
    assert nicolas_ratio(4, table) == pytest.approx(2.6095, abs=2e-4)
    report = nicolas_sweep(5_000, table)
    assert report.status == "pass"
    assert report.value > E_GAMMA
    with pytest.raises(DomainError):
        nicolas_ratio(1, table)


def test_u_forms_agree(table) -> None:
    assert u_of(17, 4, 1, table) == pytest.approx(3.058758, abs=1e-6)
    assert u_of_split(17, 4, 1, table) == pytest.approx(u_of(17, 4, 1, table), rel=1e-12)
    with pytest.raises(DomainError):
        u_of(16, 4, 1, table)
    with pytest.raises(DomainError):
        u_of(17, 4, 3, table)


def test_scans() -> None:
    assert hi_ratio_scan(range(355_991, 2_000_000, 50_000)).status == "match"
    report = q_increment_scan([356_000, 400_000, 500_000])
    assert report.status == "mismatch"
    assert all(step > 1 for step in report.details["increments"])


def test_constant_reproduction(table) -> None:
    reports = constant_reproduction(table)
    statuses = {}
    for report in reports:
        statuses.setdefault(report.quantity, []).append(report.status)
    for quantity in ("hi", "v", "j", "pmt_bracket_ratio", "pmt_final_ratio"):
        assert set(statuses[quantity]) == {"match"}, quantity
    assert statuses["q"] == ["mismatch", "match"]
    theta = {r.details["reading"]: r for r in reports if r.quantity == "theta"}
    assert theta["theta(p_30456)"].status == "mismatch"
    assert theta["theta(p_30456) + log v(30457)"].deviation == pytest.approx(0.0, abs=1e-5)
    assert theta["theta(p_30457)"].status == "match"
    assert theta["theta(p_30457)"].params == {"x": 356_023}
    # the printed gap ratio is reproduced only with log j in the denominator
    assert statuses["pmt_gap_ratio"] == ["mismatch", "match"]


def test_pmt_final_ratio_rounds_up(table) -> None:
    final = pmt_ratios(table)[-1]
    assert final.tolerance == 1e-6
    assert 1.007661 <= final.value <= 1.007662
    assert final.status == "match"


def test_v_sequence_stays_below_primes(table) -> None:
    report = v_sequence_check(V_SWITCH, V_SWITCH + 200, table)
    assert report.status == "pass"
    assert report.details == {"below_primes": True, "gaps_increasing": True}
    with pytest.raises(DomainError):
        v_sequence_check(V_SWITCH - 1, V_SWITCH + 5, table)


def test_pmt_ratios_increase(table) -> None:
    report = pmt_monotone_ratios(V_SWITCH, V_SWITCH + 50, table)
    assert report.status == "match"
    assert report.details["v_over_j_increasing"]
    assert report.details["gap_ratio_increasing"]
    assert report.value < 1


def test_goldbach_bound_small_window(table) -> None:
    floor = -18 / 61 + 480 / 2310
    result = theorem3_check(61, 5, floor, table)
    assert result.floor == pytest.approx(-0.08729, abs=1e-5)
    assert result.lhs < 0
    assert not result.passes
    assert result.representations == 4
    assert result.lhs_literal == pytest.approx(61.0)
    with pytest.raises(DomainError):
        theorem3_check(61, 5, floor - 0.01, table)
    with pytest.raises(DomainError):
        theorem3_check(100, 5, 0.0, table)


def test_large_scale_goldbach_constant(table) -> None:
    components = theorem4_components()
    assert components[0].value == pytest.approx(0.116235, abs=1e-5)
    assert components[1].status == "match"
    report = theorem4_constant(table)
    assert report.value < 0
    assert report.status == "mismatch"
    path = theorem4_path(table)
    assert not path.floor_checked
    assert not path.passes


def test_difference_quotient_misses_constant(table) -> None:
    report = olq_ratio(V_SWITCH, table)
    assert 2.5 < report.value < 3.1
    assert report.status == "mismatch"
    with pytest.raises(DomainError):
        olq_ratio(V_SWITCH - 1, table)


def test_quasi_sieve_estimate(table) -> None:
    report = zir_upper_bound(49, 4, table)
    assert report.details["w_n"] == pytest.approx(49 * 8 / 35 / 10)
    assert math.isfinite(report.value)
    with pytest.raises(DomainError):
        zir_upper_bound(49, 4, table, j_n=10.0)
