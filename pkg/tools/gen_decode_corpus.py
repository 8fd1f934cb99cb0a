#!/usr/bin/env python3
"""Regenerate the decoder-fidelity fixtures under tests/fixtures/.

Assembles randomized operand sets for every supported mnemonic with an
external reference assembler (clang's integrated RISC-V assembler,
``-march=rv64gcv``), extracts the encoded words from the object file, and
writes ``word<TAB>assembly`` lines.  Also assembles a set of instructions
*outside* the supported subset (scalar ops, masked vector forms) that the
decoder must reject.

Run from the repository root:  python3 tools/gen_decode_corpus.py
Requires a clang with the riscv64 backend on PATH; the fixtures are checked
in so the test suite itself has no toolchain dependency.
"""

from __future__ import annotations

import random
import struct
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "tests" / "fixtures"
PER_MNEMONIC = 50
SEED = 20240601

SEWS = ["e8", "e16", "e32", "e64"]
LMULS = ["m1", "m2", "m4", "m8"]
POLICIES = [", ta, ma", ", tu, mu", ", ta, mu", ", tu, ma"]


def render(rng: random.Random, mnemonic: str) -> str:
    v = lambda: f"v{rng.randrange(32)}"
    x = lambda: f"x{rng.randrange(32)}"
    f = lambda: f"f{rng.randrange(32)}"
    if mnemonic == "vsetvli":
        policy = rng.choice(POLICIES)
        return (f"vsetvli {x()}, {x()}, {rng.choice(SEWS)}, "
                f"{rng.choice(LMULS)}{policy}")
    if mnemonic == "vsetvl":
        return f"vsetvl {x()}, {x()}, {x()}"
    if mnemonic in ("vle64.v", "vse64.v"):
        return f"{mnemonic} {v()}, ({x()})"
    if mnemonic in ("vlse64.v", "vsse64.v"):
        return f"{mnemonic} {v()}, ({x()}), {x()}"
    if mnemonic in ("vluxei64.v", "vsuxei64.v"):
        return f"{mnemonic} {v()}, ({x()}), {v()}"
    if mnemonic == "vsll.vi":
        return f"vsll.vi {v()}, {v()}, {rng.randrange(32)}"
    if mnemonic.endswith(".vx"):
        return f"{mnemonic} {v()}, {v()}, {x()}"
    if mnemonic == "vid.v":
        return f"vid.v {v()}"
    if mnemonic == "vfmv.v.f":
        return f"vfmv.v.f {v()}, {f()}"
    if mnemonic == "vrgather.vv":
        # the reference assembler enforces non-overlapping vd
        regs = rng.sample(range(32), 3)
        return f"vrgather.vv v{regs[0]}, v{regs[1]}, v{regs[2]}"
    return f"{mnemonic} {v()}, {v()}, {v()}"  # the .vv forms


NEGATIVES = [
    "add x1, x2, x3",
    "addi x5, x6, 42",
    "sub x7, x8, x9",
    "ld x10, 8(x11)",
    "sd x12, 16(x13)",
    "lw x14, 0(x15)",
    "mul x16, x17, x18",
    "fadd.d f1, f2, f3",
    "fmul.d f4, f5, f6",
    "fld f7, 0(x19)",
    "fsd f8, 8(x20)",
    "beq x21, x22, .",
    "jal x1, .",
    "lui x23, 4096",
    "auipc x24, 16",
    "vadd.vv v1, v2, v3, v0.t",      # masked forms are rejected
    "vle64.v v4, (x10), v0.t",
    "vfadd.vv v5, v6, v7, v0.t",
    "vsetivli x1, 16, e64, m1, ta, ma",   # immediate-avl form
    "vle32.v v1, (x10)",             # 32-bit element accesses
    "vse32.v v2, (x11)",
    "vor.vv v1, v2, v3",             # integer ops outside the subset
    "vxor.vv v4, v5, v6",
    "vsub.vv v7, v8, v9",
    "vfdiv.vv v10, v11, v12",
    "vmv.v.v v13, v14",
    "vmseq.vv v0, v15, v16",
    "vsetvli x1, x2, e64, mf2, ta, ma",   # fractional groups are not representable
]


def assemble(lines: list[str]) -> list[int]:
    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / "corpus.s"
        obj = Path(tmp) / "corpus.o"
        src.write_text("".join(f"    {line}\n" for line in lines))
        subprocess.run(
            ["clang", "-target", "riscv64", "-march=rv64gcv", "-c",
             str(src), "-o", str(obj)],
            check=True)
        data = obj.read_bytes()
        return _elf_text_words(data)


def _elf_text_words(data: bytes) -> list[int]:
    assert data[:4] == b"\x7fELF", "not an ELF object"
    shoff = struct.unpack_from("<Q", data, 0x28)[0]
    shentsize = struct.unpack_from("<H", data, 0x3A)[0]
    shnum = struct.unpack_from("<H", data, 0x3C)[0]
    shstrndx = struct.unpack_from("<H", data, 0x3E)[0]

    def section(i):
        name, _stype, _flags, _addr, off, size = struct.unpack_from(
            "<IIQQQQ", data, shoff + i * shentsize)
        return name, off, size

    shstr_off = section(shstrndx)[1]
    for i in range(shnum):
        name, off, size = section(i)
        end = data.index(b"\0", shstr_off + name)
        if data[shstr_off + name:end] == b".text":
            count = size // 4
            return list(struct.unpack_from(f"<{count}I", data, off))
    raise RuntimeError("no .text section")


def main() -> int:
    sys.path.insert(0, str(REPO / "src"))
    from sdvkit.isa import MNEMONICS

    rng = random.Random(SEED)
    positives: list[str] = []
    for mnemonic in MNEMONICS:
        seen = set()
        count = 0
        attempts = 0
        while count < PER_MNEMONIC:
            line = render(rng, mnemonic)
            attempts += 1
            # small operand spaces (vid.v) cannot fill 50 unique lines
            if line in seen and attempts < 20 * PER_MNEMONIC:
                continue
            seen.add(line)
            positives.append(line)
            count += 1
    words = assemble(positives)
    assert len(words) == len(positives)
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with open(FIXTURES / "decode_corpus.txt", "w") as fh:
        fh.write("# word<TAB>assembly, assembled by clang -target riscv64 -march=rv64gcv\n")
        for word, line in zip(words, positives):
            fh.write(f"0x{word:08x}\t{line}\n")

    neg_words = assemble(NEGATIVES)
    with open(FIXTURES / "decode_negatives.txt", "w") as fh:
        fh.write("# words that must NOT decode (outside the supported subset)\n")
        fh.write("0x00000000\tall-zero word (defined illegal)\n")
        fh.write("0xffffffff\tall-ones word\n")
        for word, line in zip(neg_words, NEGATIVES):
            fh.write(f"0x{word:08x}\t{line}\n")
    print(f"wrote {len(words)} corpus words and {len(neg_words) + 2} negatives")
    return 0


if __name__ == "__main__":
    sys.exit(main())
