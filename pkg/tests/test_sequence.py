from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kakeyalab.numeric import Dyadic
from kakeyalab.sequence import (
    block,
    block_offset,
    block_size,
    check_obs1,
    index_of,
    level_of_index,
    step,
    x_at,
)


def rats(block_obj):
    return [v.to_rat() for v in block_obj.values]


def test_first_blocks():
    assert rats(block(0)) == [0]
    assert rats(block(1)) == [1, Fraction(1, 2), 0, Fraction(-1, 2), -1, Fraction(-3, 2)]
    b2 = rats(block(2))
    assert len(b2) == 20
    assert b2[0] == -2
    assert b2[1] == Fraction(-7, 4)
    assert b2[-1] == Fraction(11, 4)


def test_block_cap():
    with pytest.raises(ValueError):
        block(10, max_size=100)


def test_block_offsets():
    assert [block_offset(m) for m in range(5)] == [0, 1, 7, 27, 83]
    for m in range(12):
        assert block_offset(m + 1) - block_offset(m) == block_size(m)


def test_x_at_examples():
    assert x_at(0) == Dyadic(0, 0)
    assert x_at(1) == Dyadic(1, 0)
    assert x_at(7).to_rat() == -2
    assert x_at(15) == Dyadic(0, 0)


@given(st.integers(min_value=0, max_value=5000))
def test_x_at_matches_block_tables(k):
    level = level_of_index(k)
    blk = block(level)
    assert blk.start <= k < blk.start + len(blk.values)
    assert x_at(k) == blk.values[k - blk.start]


def test_index_of_examples():
    assert index_of(0, Dyadic(0, 0)).k == 0
    assert index_of(1, Dyadic(1, 0)).k == 1
    assert index_of(1, Dyadic(0, 0)).k == 3
    assert index_of(2, Dyadic(0, 0)).k == 15


@given(st.integers(min_value=0, max_value=9), st.data())
def test_index_of_round_trip(m, data):
    lo, hi = -(m << m), m << m
    scaled = data.draw(st.integers(min_value=lo, max_value=hi))
    xhat = Dyadic.make(scaled, m)
    idx = index_of(m, xhat)
    assert idx.level == m
    assert x_at(idx.k) == xhat


def test_index_of_rejects_bad_inputs():
    with pytest.raises(ValueError):
        index_of(1, Dyadic(1, 2))  # not 1-dyadic
    with pytest.raises(ValueError):
        index_of(2, Dyadic(3, 0))  # outside [-2, 2]


@given(st.integers(min_value=0, max_value=6), st.data())
def test_later_steps_stay_small(m, data):
    # after any index in block m the sequence moves by at most 2**-m per step
    xhat = Dyadic.make(data.draw(st.integers(min_value=-(m << m), max_value=m << m)), m)
    k = index_of(m, xhat).k
    for n in data.draw(st.lists(st.integers(min_value=k + 1, max_value=k + 40), max_size=8)):
        assert abs(step(n).to_rat()) <= Fraction(1, 1 << m)


def test_step_values():
    assert step(1).to_rat() == -1  # x_0=0 to x_1=1
    assert step(2).to_rat() == Fraction(1, 2)


def test_check_obs1_range():
    rows = check_obs1(4, 20)
    assert len(rows) == 17
    assert all(r.ok for r in rows)
    assert rows[0].max_index == 226 and rows[0].bound == 256
    assert rows[1].max_index == 578 and rows[1].bound == 1024
    # the bound genuinely needs m >= 4
    assert not check_obs1(3, 3)[0].ok
