import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import mtrumor as mt
from conftest import D_FIRST, RATIO_J1_HP


def dj_fraction_oracle(j_max):
    """Direct rational transcription of the recursion, no optimizations."""
    d = [Fraction(1)]
    for j in range(2, j_max + 1):
        s = Fraction(j ** (2 * j), math.factorial(j - 1))
        for i in range(1, j):
            s -= Fraction(j ** (2 * (j - i)), math.factorial(j - i)) * d[i - 1]
        assert s.denominator == 1, f"non-integer d_{j}"
        d.append(s)
    return [int(v) for v in d]


ORACLE_60 = dj_fraction_oracle(60)


def test_first_values_match_hand_derivation():
    assert ORACLE_60[:8] == D_FIRST


def test_production_matches_fraction_oracle():
    table = mt.get_table(60)
    assert table.values[:60] == ORACLE_60


def test_d1_is_one():
    assert mt.compute_exact(1).values == [1]


def test_strictly_increasing(table520):
    vals = table520.values
    assert all(vals[j] > vals[j - 1] for j in range(1, len(vals)))


def test_log_values_match_direct_log(table520):
    for j in (1, 2, 7, 60, 300, 520):
        assert table520.log_d(j) == pytest.approx(math.log(table520.d(j)),
                                                  rel=1e-12, abs=1e-12)


def test_log_via_bitlength_mantissa(table520):
    # independent route: split off the high 64 bits, add the shift in log space
    for j in (2, 50, 333, 520):
        v = table520.d(j)
        shift = max(v.bit_length() - 64, 0)
        alt = math.log(v >> shift) + shift * math.log(2.0)
        assert table520.log_d(j) == pytest.approx(alt, rel=1e-12)


def test_log_d2():
    table = mt.get_table(2)
    assert table.log_d(2) == pytest.approx(math.log(12.0), abs=1e-14)


def test_log_d_dispatch(table520, consts):
    assert mt.log_d(1, "exact", table520) == 0.0
    assert mt.log_d(2, "exact", table520) == pytest.approx(math.log(12.0))
    asym = mt.log_d(500, "asymptotic", constants=consts)
    assert asym == pytest.approx(table520.log_d(500), abs=5e-3)
    with pytest.raises(ValueError):
        mt.log_d(1, "exact")          # no table
    with pytest.raises(ValueError):
        table520.log_d(521)           # beyond range
    with pytest.raises(ValueError):
        mt.log_d(0, "asymptotic")
    with pytest.raises(ValueError):
        mt.log_d(3, "no_such_backend", table520)


def test_asymptotic_ratio_at_one(table520, consts):
    assert mt.asymptotic_ratio(1, table520, consts) == pytest.approx(
        RATIO_J1_HP, rel=1e-9)


def test_asymptotic_gap_at_500(table520, consts):
    gap = math.exp(table520.log_d(500)
                   - mt.asymptotic_log_d(500, consts)) - 1.0
    assert abs(gap) <= 2.0 / 500.0


def test_ratio_monotone_approach(table520, consts):
    for j in (50, 100, 200):
        r1 = abs(mt.asymptotic_ratio(j, table520, consts) - 1.0)
        r2 = abs(mt.asymptotic_ratio(2 * j, table520, consts) - 1.0)
        assert r2 < r1


def test_ratio_constant_is_order_one(table520, consts):
    worst = max(j * abs(mt.asymptotic_ratio(j, table520, consts) - 1.0)
                for j in range(50, 521))
    assert worst <= 0.5  # measured 0.177, attained at j = 50


def test_hybrid_log_d_crosses_over(table520, consts):
    js = np.array([1, 520, 521, 900])
    out = mt.hybrid_log_d(js, table520, consts)
    assert out[0] == 0.0
    assert out[1] == table520.log_d(520)
    assert out[2] == pytest.approx(float(mt.asymptotic_log_d(521, consts)))
    assert out[3] == pytest.approx(float(mt.asymptotic_log_d(900, consts)))


def test_restrict_view(table520):
    small = table520.restrict(10)
    assert small.j_max == 10
    assert small.values == table520.values[:10]
    with pytest.raises(ValueError):
        small.log_d(11)
    with pytest.raises(ValueError):
        table520.restrict(1000)


def test_compute_exact_guards():
    with pytest.raises(ValueError):
        mt.compute_exact(0)
    caps = mt.ResourceCaps(dj_max=100)
    with pytest.raises(ValueError):
        mt.compute_exact(101, caps=caps)


def test_block_size_does_not_change_values():
    a = mt.compute_exact(120, block=1)
    b = mt.compute_exact(120, block=7)
    c = mt.compute_exact(120, block=64)
    assert a.values == b.values == c.values


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=60))
def test_any_prefix_matches_oracle(j):
    assert mt.get_table(60).d(j) == ORACLE_60[j - 1]
