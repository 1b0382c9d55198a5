import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csapp.bitio import (
    BitString,
    BitWriter,
    DecodeError,
    PlainBitvector,
    delta_decode,
    delta_encode,
    delta_length,
    pack_fields,
)


def delta_by_definition(v):
    """Elias delta straight from the definition, as a '0'/'1' string."""
    nbits = len(bin(v)) - 2
    gamma = "0" * (len(bin(nbits)) - 3) + bin(nbits)[2:]
    return gamma + bin(v)[3:]


@pytest.mark.parametrize("v, code", [(1, "1"), (2, "0100"), (16, "001010000")])
def test_delta_encode_examples(v, code):
    assert delta_by_definition(v) == code
    assert str(delta_encode(v)) == code


def test_delta_decode_examples():
    assert delta_decode(BitString.from_str("1"), 0) == (1, 1)
    assert delta_decode(BitString.from_str("0100"), 0)[0] == 2
    assert delta_decode(BitString.from_str("001010000" + "1"), 0) == (16, 9)


def test_delta_rejects_zero():
    with pytest.raises(ValueError):
        delta_encode(0)


@pytest.mark.parametrize("bits", ["", "0", "000", "0010100", "0110"])
def test_delta_truncated(bits):
    with pytest.raises(DecodeError):
        delta_decode(BitString.from_str(bits), 0)


@given(st.integers(min_value=1, max_value=2**32 - 1))
def test_delta_roundtrip(v):
    code = delta_encode(v)
    assert str(code) == delta_by_definition(v)
    assert len(code) == delta_length(v)
    assert delta_decode(code, 0) == (v, len(code))


@given(st.lists(st.integers(min_value=1, max_value=10**6), max_size=50))
def test_delta_stream(values):
    w = BitWriter()
    for v in values:
        w.write_delta(v)
    stream = w.getvalue()
    pos = 0
    out = []
    for _ in values:
        v, pos = delta_decode(stream, pos)
        out.append(v)
    assert out == values and pos == len(stream)


def test_select0_examples():
    assert PlainBitvector("0110100").select0(2) == 4
    assert PlainBitvector("0").select0(1) == 1
    assert PlainBitvector("1110").select0(1) == 4
    with pytest.raises(IndexError):
        PlainBitvector("1110").select0(2)


def test_rank1_examples():
    assert PlainBitvector("0110100").rank1(7) == 3
    assert PlainBitvector("0110100").rank1(0) == 0
    assert PlainBitvector("1111").rank1(2) == 2
    with pytest.raises(IndexError):
        PlainBitvector("1111").rank1(5)


bitstrings = st.text(alphabet="01", max_size=300)


@given(bitstrings)
def test_rank_select_match_scan(bits):
    bv = PlainBitvector(bits)
    ones = [i + 1 for i, b in enumerate(bits) if b == "1"]
    zeros = [i + 1 for i, b in enumerate(bits) if b == "0"]
    for i in range(len(bits) + 1):
        assert bv.rank1(i) == bits[:i].count("1")
        assert bv.rank0(i) == bits[:i].count("0")
    for j, p in enumerate(ones, 1):
        assert bv.select1(j) == p
        assert bv.rank1(bv.select1(j)) == j
    for j, p in enumerate(zeros, 1):
        assert bv.select0(j) == p
        assert bv.rank0(bv.select0(j)) == j
    assert [bv[i] for i in range(len(bits))] == [int(b) for b in bits]


@given(bitstrings, st.integers(min_value=0, max_value=64))
def test_read_fields(bits, width):
    bv = PlainBitvector(bits)
    for pos in range(0, max(0, len(bits) - width) + 1, 7):
        if pos + width <= len(bits):
            expected = int(bits[pos : pos + width], 2) if width else 0
            assert bv.read(pos, width) == expected


def test_packed_layout_is_lsb_first():
    # stream bit 0 lands in bit 0 of byte 0; the tail is zero padded
    bits = BitString.from_str("1000000011")
    data = bits.serialize()
    assert data[:8] == (10).to_bytes(8, "little")
    assert data[8:] == bytes([0b00000001, 0b00000011])


@given(bitstrings)
def test_serialize_roundtrip(bits):
    b = BitString.from_str(bits)
    data = b.serialize() + b"tail"
    back, end = BitString.deserialize(data)
    assert back == b and data[end:] == b"tail"
    assert len(b.serialize()) == b.serialized_size()


def test_deserialize_truncated():
    data = BitString.from_str("1" * 20).serialize()
    with pytest.raises(DecodeError):
        BitString.deserialize(data[:-1])


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(0, 2**70), st.integers(0, 80)), max_size=200))
def test_writer_matches_concatenation(fields):
    w = BitWriter()
    expected = ""
    for value, width in fields:
        value &= (1 << width) - 1
        w.write(value, width)
        expected += format(value, f"0{width}b") if width else ""
    assert str(w.getvalue()) == expected


def test_writer_rejects_wide_value():
    with pytest.raises(ValueError):
        BitWriter().write(4, 2)


@pytest.mark.parametrize("count", [0, 5, 63, 64, 500])
def test_pack_fields_both_paths(count):
    values = [(i * 2654435761) % 1024 for i in range(count)]
    packed = pack_fields(values, 10)
    assert str(packed) == "".join(format(v, "010b") for v in values)
