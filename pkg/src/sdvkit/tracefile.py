"""Plain-text trace format: one colon-separated line per executed instruction.

Header line ``#sdvkit-trace v1``, then::

    seq:pc:phase:scalar_before:vl:sew:category:mnemonic_text:addr_ranges:window

with pc in hex, addr_ranges as comma-separated ``base+length`` hex pairs
(empty for non-memory instructions).  Single-line records keep downstream
tools line-parallel; writing is deterministic so identical runs produce
byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import TraceFormatError
from .isa import Category

HEADER = "#sdvkit-trace v1"


@dataclass(frozen=True)
class TraceRecord:
    seq: int
    pc: int
    phase: int
    scalar_before: int
    mnemonic_text: str
    category: Category
    vl: int
    sew_bits: int
    addresses: tuple[tuple[int, int], ...] = ()
    window_id: int = 0


def write_trace(records: Sequence[TraceRecord]) -> str:
    lines = [HEADER]
    for r in records:
        ranges = ",".join(f"0x{base:x}+0x{length:x}" for base, length in r.addresses)
        lines.append(
            f"{r.seq}:0x{r.pc:x}:{r.phase}:{r.scalar_before}:{r.vl}:{r.sew_bits}:"
            f"{r.category.value}:{r.mnemonic_text}:{ranges}:{r.window_id}"
        )
    return "\n".join(lines) + "\n"


def read_trace(text: str) -> list[TraceRecord]:
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise TraceFormatError(f"missing header {HEADER!r}", 1)
    records: list[TraceRecord] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(":")
        if len(parts) != 10:
            raise TraceFormatError(f"expected 10 fields, got {len(parts)}", line_no)
        try:
            seq = int(parts[0])
            pc = int(parts[1], 16)
            phase = int(parts[2])
            scalar_before = int(parts[3])
            vl = int(parts[4])
            sew = int(parts[5])
            category = Category(parts[6])
            mnemonic_text = parts[7]
            addresses = []
            if parts[8]:
                for chunk in parts[8].split(","):
                    base, length = chunk.split("+")
                    addresses.append((int(base, 16), int(length, 16)))
            window = int(parts[9])
        except (ValueError, KeyError) as err:
            raise TraceFormatError(str(err), line_no) from err
        records.append(TraceRecord(seq, pc, phase, scalar_before, mnemonic_text,
                                   category, vl, sew, tuple(addresses), window))
    return records
