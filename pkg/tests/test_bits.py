import pytest
from hypothesis import given, strategies as st

from mixerlab import as_int, from_bits, pair_decode, pair_encode, to_bits
from mixerlab.errors import MalformedQueryError


def test_to_bits_is_msb_first():
    assert to_bits(5, 4) == "0101"
    assert to_bits(0, 3) == "000"
    assert to_bits(1, 1) == "1"


def test_from_bits_examples():
    assert from_bits("0101") == 5
    assert from_bits("000") == 0


@given(st.integers(min_value=1, max_value=16), st.data())
def test_round_trip(width, data):
    x = data.draw(st.integers(min_value=0, max_value=(1 << width) - 1))
    assert from_bits(to_bits(x, width)) == x


def test_width_mismatch_rejected():
    with pytest.raises(MalformedQueryError):
        to_bits(8, 3)
    with pytest.raises(MalformedQueryError):
        from_bits("01x")


def test_as_int_accepts_both_forms():
    assert as_int("101", 3) == 5
    assert as_int(5, 3) == 5
    with pytest.raises(MalformedQueryError):
        as_int("10", 3)
    with pytest.raises(MalformedQueryError):
        as_int(9, 3)


@given(
    st.integers(min_value=1, max_value=8),
    st.integers(min_value=0, max_value=255),
    st.integers(min_value=0, max_value=255),
)
def test_pair_encoding_round_trip(n, r, z):
    r %= 1 << n
    z %= 1 << n
    x = pair_encode(r, z, n)
    assert pair_decode(x, n) == (r, z)
    assert 0 <= x < 1 << (2 * n)
