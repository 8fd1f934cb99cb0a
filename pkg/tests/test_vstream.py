import pytest

from sdvkit.errors import (MalformedNumber, StreamSyntaxError, UnknownDirective)
from sdvkit.isa import Instruction
from sdvkit.vstream import ItemKind, StreamItem, parse_vstream, write_vstream


def _instructions(items):
    return [i for i in items if i.kind == ItemKind.INSTRUCTION]


def test_phase_and_scalar_resolution():
    items = parse_vstream(".phase 2\n.scalar 17\nvfadd.vv v1, v2, v3\n")
    instrs = _instructions(items)
    assert len(instrs) == 1
    assert instrs[0].phase == 2
    assert instrs[0].scalar_before == 17
    assert instrs[0].instr == Instruction("vfadd.vv", vd=1, vs2=2, vs1=3)
    marks = [i for i in items if i.kind == ItemKind.PHASE_MARK]
    assert len(marks) == 1 and marks[0].ivalue == 2


def test_scalar_is_one_shot():
    items = _instructions(parse_vstream(
        ".scalar 9\nvid.v v1\nvid.v v2\n"))
    assert [i.scalar_before for i in items] == [9, 0]


def test_xreg_then_instruction():
    items = parse_vstream(".xreg x10 0x1000\nvle64.v v4, (x10)\n")
    assert items[0].kind == ItemKind.SET_XREG
    assert items[0].reg == 10 and items[0].ivalue == 0x1000
    assert items[1].kind == ItemKind.INSTRUCTION
    assert items[1].instr.rs1 == 10


def test_pc_defaults_plus_four():
    items = _instructions(parse_vstream(
        ".pc 0x80000000\nvid.v v1\nvid.v v2\nvid.v v3\n"))
    assert [i.pc for i in items] == [0x80000000, 0x80000004, 0x80000008]


def test_initial_pc_is_zero():
    items = _instructions(parse_vstream("vid.v v1\nvid.v v2\n"))
    assert [i.pc for i in items] == [0, 4]


def test_unknown_directive():
    with pytest.raises(UnknownDirective) as excinfo:
        parse_vstream("vid.v v1\n.bogus 1\n")
    assert excinfo.value.line == 2


def test_malformed_number():
    with pytest.raises(MalformedNumber) as excinfo:
        parse_vstream(".phase zebra\n")
    assert excinfo.value.line == 1
    with pytest.raises(MalformedNumber):
        parse_vstream(".freg f1 not-a-float\n")


def test_instruction_error_carries_line():
    with pytest.raises(StreamSyntaxError) as excinfo:
        parse_vstream("vid.v v1\nvid.v v2\nvbroken v3\n")
    assert excinfo.value.line == 3


def test_errors_are_line_local():
    text = ".phase 1\nvid.v v1\nvid.v v2\n"
    good = parse_vstream(text)
    with pytest.raises(StreamSyntaxError):
        parse_vstream(text + ".bogus\n")
    assert parse_vstream(text) == good  # earlier lines parse identically


def test_comments_and_blank_lines():
    items = parse_vstream("# header comment\n\nvid.v v1  # trailing\n")
    assert len(_instructions(items)) == 1


def test_memory_init_directives():
    items = parse_vstream(
        ".memf64 0x1000 1.5 -2.25\n.memu64 0x2000 0x10 7\n.freg f3 0.5\n")
    assert items[0].kind == ItemKind.INIT_MEM_F64
    assert items[0].address == 0x1000 and items[0].fvalues == (1.5, -2.25)
    assert items[1].kind == ItemKind.INIT_MEM_U64
    assert items[1].uvalues == (0x10, 7)
    assert items[2].kind == ItemKind.SET_FREG and items[2].fvalue == 0.5


def test_window_marks_persist():
    items = parse_vstream(".window 5\nvid.v v1\nvid.v v2\n.window 6\nvid.v v3\n")
    instrs = _instructions(items)
    assert [i.window for i in instrs] == [5, 5, 6]


def test_write_parse_roundtrip_simple():
    text = (".pc 0x100\n.phase 1\n.window 2\n.xreg x10 0x1000\n"
            ".freg f1 2.5\n.memf64 0x2000 1.0 2.0\n.memu64 0x3000 0x8\n"
            ".scalar 3\nvle64.v v1, (x10)\nvfmv.v.f v2, f1\n")
    items = parse_vstream(text)
    assert parse_vstream(write_vstream(items)) == items


def test_write_parse_roundtrip_nonconsecutive_pcs():
    # reordered instructions keep their own pcs; the writer must re-emit .pc
    items = parse_vstream(".pc 0x100\nvid.v v1\nvid.v v2\nvid.v v3\n")
    shuffled = [items[2], items[0], items[1]]
    again = parse_vstream(write_vstream(shuffled))
    assert [i.pc for i in again] == [0x108, 0x100, 0x104]
    assert again == shuffled


def test_write_empty():
    assert write_vstream([]) == ""
