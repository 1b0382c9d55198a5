import pytest
from hypothesis import given
from hypothesis import strategies as st

from csapp.eliasfano import EliasFanoSequence, ef_access, ef_encode, ef_successor

from oracles import scan_successor


def test_small_sequence_layout():
    seq = ef_encode([6, 7, 10], 4)
    assert seq.ell == 2
    assert str(seq.high) == "0110100"
    assert str(seq.low) == "101110"
    assert seq.size_bits() == 13
    assert ef_access(seq, 2) == 10
    assert ef_successor(seq, 8) == (2, 10)
    assert ef_successor(seq, 0) == (0, 6)
    assert ef_successor(seq, 11) is None
    # two low parts live in the first two buckets
    assert seq.high.select0(2) - 2 == 2


def test_singleton():
    seq = ef_encode([0], 1)
    assert seq.ell == 1 and str(seq.high) == "10" and str(seq.low) == "0"
    seq = ef_encode([0], 0)
    assert seq.ell == 0 and str(seq.high) == "10" and len(seq.low) == 0
    assert ef_access(seq, 0) == 0
    assert ef_access(ef_encode([37], 8), 0) == 37


def test_encode_errors():
    with pytest.raises(ValueError):
        ef_encode([1, 16], 4)
    with pytest.raises(ValueError):
        ef_encode([3, 2], 4)
    with pytest.raises(ValueError):
        ef_encode([], 4)
    with pytest.raises(IndexError):
        ef_access(ef_encode([1, 2], 4), 2)


def test_ell_clamped_when_dense():
    seq = ef_encode(list(range(16)) + [15, 15], 4)
    assert seq.ell == 0
    assert seq.decode() == list(range(16)) + [15, 15]


@st.composite
def sequences(draw):
    U = draw(st.integers(min_value=0, max_value=20))
    values = sorted(draw(st.lists(st.integers(0, (1 << U) - 1), min_size=1, max_size=150)))
    return values, U


@given(sequences(), st.data())
def test_roundtrip_size_and_successor(case, data):
    values, U = case
    seq = ef_encode(values, U)
    k = len(values)
    assert [ef_access(seq, i) for i in range(k)] == values
    assert seq.decode() == values
    assert seq.size_bits() == k + (1 << (U - seq.ell)) + k * seq.ell
    for x in data.draw(st.lists(st.integers(-2, (1 << U) + 2), max_size=20)) + values:
        expected = scan_successor(values, x)
        assert ef_successor(seq, x) == expected
        start = data.draw(st.integers(0, k))
        if expected is None or expected[0] >= start:
            assert seq.successor_from(x, start) == expected


@given(sequences())
def test_bucket_prefix_identity(case):
    values, U = case
    seq = ef_encode(values, U)
    nbuckets = len(seq.high) - seq.k
    for h in range(1, nbuckets + 1):
        assert seq.high.select0(h) - h == sum(1 for v in values if (v >> seq.ell) < h)


@given(sequences())
def test_serialization(case):
    values, U = case
    seq = ef_encode(values, U)
    data = seq.serialize()
    back, end = EliasFanoSequence.deserialize(data)
    assert end == len(data) == seq.serialized_size()
    assert back.decode() == values and back.serialize() == data


def test_duplicates_allowed():
    values = [3, 3, 3, 9, 9]
    seq = ef_encode(values, 4)
    assert seq.decode() == values
    assert ef_successor(seq, 3) == (0, 3)
    assert ef_successor(seq, 4) == (3, 9)
