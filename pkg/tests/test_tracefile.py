import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdvkit.errors import TraceFormatError
from sdvkit.isa import Category
from sdvkit.tracefile import HEADER, TraceRecord, read_trace, write_trace


def test_empty_roundtrip():
    text = write_trace([])
    assert text == HEADER + "\n"
    assert read_trace(text) == []


def test_single_record_roundtrip():
    record = TraceRecord(seq=0, pc=0x80000000, phase=2, scalar_before=17,
                         mnemonic_text="vfadd.vv v1, v2, v3",
                         category=Category.ARITH_FP, vl=256, sew_bits=64)
    text = write_trace([record])
    assert len(text.splitlines()) == 2
    assert read_trace(text) == [record]


def test_memory_record_roundtrip():
    record = TraceRecord(seq=3, pc=0x1000, phase=0, scalar_before=0,
                         mnemonic_text="vluxei64.v v1, (x10), v2",
                         category=Category.MEM_INDEXED, vl=3, sew_bits=64,
                         addresses=((0x1010, 8), (0x1000, 16)), window_id=7)
    assert read_trace(write_trace([record])) == [record]


_categories = st.sampled_from(list(Category))
_ranges = st.tuples(st.integers(0, 1 << 40), st.integers(0, 1 << 16))


@st.composite
def records(draw):
    n = draw(st.integers(0, 20))
    out = []
    for seq in range(n):
        out.append(TraceRecord(
            seq=seq,
            pc=draw(st.integers(0, (1 << 64) - 1)),
            phase=draw(st.integers(0, 7)),
            scalar_before=draw(st.integers(0, 1000)),
            mnemonic_text=draw(st.sampled_from(
                ["vfadd.vv v1, v2, v3", "vle64.v v4, (x10)",
                 "vsetvli x1, x2, e64, m1", "vsuxei64.v v8, (x16), v9"])),
            category=draw(_categories),
            vl=draw(st.integers(0, 256)),
            sew_bits=64,
            addresses=tuple(draw(st.lists(_ranges, max_size=4))),
            window_id=draw(st.integers(0, 1 << 31))))
    return out


@settings(max_examples=200, deadline=None)
@given(records())
def test_roundtrip_property(recs):
    assert read_trace(write_trace(recs)) == recs


def test_rewrite_is_byte_identical():
    recs = [TraceRecord(seq=i, pc=4 * i, phase=0, scalar_before=0,
                        mnemonic_text="vid.v v1", category=Category.ARITH_INT,
                        vl=8, sew_bits=64) for i in range(50)]
    text = write_trace(recs)
    assert write_trace(read_trace(text)) == text


def test_missing_header():
    with pytest.raises(TraceFormatError) as excinfo:
        read_trace("0:0x0:0:0:8:64:CONFIG:vid.v v1::0\n")
    assert excinfo.value.line == 1


def test_bad_field_count():
    with pytest.raises(TraceFormatError) as excinfo:
        read_trace(HEADER + "\n0:0x0:0:0:8:64:CONFIG\n")
    assert excinfo.value.line == 2


def test_bad_category():
    with pytest.raises(TraceFormatError):
        read_trace(HEADER + "\n0:0x0:0:0:8:64:NOPE:vid.v v1::0\n")
