"""Desk-scale toolkit for studying long-vector RISC-V code: functional
vector-subset emulation, per-instruction traces, Paraver-compatible timeline
export, a two-pipeline cycle model with counter analogs, per-phase
vectorization analysis, and dependence-aware instruction rescheduling."""

__version__ = "0.1.0"

from .config import MachineConfig, Vtype
from .emulator import MachineState, apply_vsetvli, run, step
from .isa import Category, Instruction, disassemble, parse_instruction
from .decoding import decode_word
from .timing import CounterSet, TimelineEntry, TimingParams, occupancy, simulate
from .tracefile import TraceRecord, read_trace, write_trace
from .vstream import ItemKind, StreamItem, parse_vstream, write_vstream

__all__ = [
    "Category", "CounterSet", "Instruction", "ItemKind", "MachineConfig",
    "MachineState", "StreamItem", "TimelineEntry", "TimingParams",
    "TraceRecord", "Vtype", "apply_vsetvli", "decode_word", "disassemble",
    "occupancy", "parse_instruction", "parse_vstream", "read_trace", "run",
    "simulate", "step", "write_trace", "write_vstream",
]
