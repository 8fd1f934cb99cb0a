"""Machine configuration and the key=value config-file loaders."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SdvError
from .timing import TimingParams


@dataclass
class Vtype:
    """Active element width / register grouping; vill marks an unusable state."""
    sew_bits: int = 64
    lmul: int = 1
    vill: bool = False


@dataclass
class MachineConfig:
    vlen_bits: int = 16384
    lanes: int = 8
    elen_bits: int = 64
    memory_bytes: int = 2 ** 28
    timing: TimingParams = field(default_factory=TimingParams)

    def __post_init__(self):
        if self.vlen_bits < 128 or self.vlen_bits & (self.vlen_bits - 1):
            raise ValueError("vlen_bits must be a power of two >= 128")
        if self.elen_bits not in (32, 64):
            raise ValueError("elen_bits must be 32 or 64")
        regs_elems = self.vlen_bits // self.elen_bits
        if self.lanes < 1 or regs_elems % self.lanes:
            raise ValueError("lanes must divide vlen_bits/elen_bits")
        if self.memory_bytes < 1:
            raise ValueError("memory_bytes must be positive")

    def vlmax(self, sew_bits: int = 64, lmul: int = 1) -> int:
        return (self.vlen_bits // sew_bits) * lmul


_TIMING_KEYS = {f.name for f in dataclasses.fields(TimingParams)}
_MACHINE_KEYS = {"vlen_bits", "lanes", "elen_bits", "memory_bytes"}


def _parse_kv(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("[") and line.endswith("]"):
            continue
        if "=" not in line:
            raise SdvError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _coerce(key: str, value: str):
    if key == "chaining":
        lowered = value.lower()
        if lowered in ("true", "1", "yes", "on"):
            return True
        if lowered in ("false", "0", "no", "off"):
            return False
        raise SdvError(f"config key {key}: expected boolean, got {value!r}")
    try:
        return int(value, 0)
    except ValueError:
        raise SdvError(f"config key {key}: expected integer, got {value!r}") from None


def load_timing_params(path: str | Path) -> TimingParams:
    """Load timing parameters from a key=value file; unset keys keep defaults."""
    values = _parse_kv(Path(path).read_text())
    kwargs = {}
    for key, value in values.items():
        if key in _TIMING_KEYS:
            kwargs[key] = _coerce(key, value)
        elif key not in _MACHINE_KEYS:
            raise SdvError(f"unknown timing parameter {key!r}")
    return TimingParams(**kwargs)


def load_machine_config(path: str | Path) -> MachineConfig:
    """Load a machine configuration; timing keys may live in the same file."""
    values = _parse_kv(Path(path).read_text())
    machine_kwargs = {}
    timing_kwargs = {}
    for key, value in values.items():
        if key in _MACHINE_KEYS:
            machine_kwargs[key] = _coerce(key, value)
        elif key in _TIMING_KEYS:
            timing_kwargs[key] = _coerce(key, value)
        else:
            raise SdvError(f"unknown machine parameter {key!r}")
    return MachineConfig(timing=TimingParams(**timing_kwargs), **machine_kwargs)
