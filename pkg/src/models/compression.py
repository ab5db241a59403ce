import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

from src.utils.core import ilog
from src.utils.errors import MdCapViolation, PreconditionFailed


class FamilyKind(Enum):
    LIN = "Lin"
    POLY = "Poly"
    POLYLOG = "Polylog"
    REC = "Rec"


@dataclass(frozen=True)
class TimeBoundFamily:
    """Lin: k*n, Poly: k*n^k, Polylog: ilog(n)^k, Rec: an optional explicit budget."""

    kind: FamilyKind
    k: int = 1
    budget_fn: Optional[Callable[[int], int]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"family parameter must be positive, got {self.k}")

    @classmethod
    def lin(cls, k=1):
        return cls(FamilyKind.LIN, k)

    @classmethod
    def poly(cls, k=2):
        return cls(FamilyKind.POLY, k)

    @classmethod
    def polylog(cls, k=2):
        return cls(FamilyKind.POLYLOG, k)

    @classmethod
    def rec(cls, budget_fn=None):
        return cls(FamilyKind.REC, 1, budget_fn)

    def bound(self, n: int) -> Optional[int]:
        """t(n), or None for a Rec family without an explicit budget."""
        if self.kind is FamilyKind.LIN:
            return self.k * n
        if self.kind is FamilyKind.POLY:
            return self.k * n ** self.k
        if self.kind is FamilyKind.POLYLOG:
            return ilog(n) ** self.k
        return self.budget_fn(n) if self.budget_fn is not None else None

    @property
    def label(self):
        if self.kind is FamilyKind.REC:
            return 'Rec'
        return f"{self.kind.value}(k={self.k})"

    def to_dict(self):
        return {'family': self.kind.value, 'k': self.k}


class MdKind(Enum):
    TAMED_EXP = "TamedExp"
    QUADRATIC = "Quadratic"
    PAPER_DOUBLE_EXP = "PaperDoubleExp"


@dataclass(frozen=True)
class MdFunction:
    """The global cap on how many sequence bits j program bits may yield.

    Values are clamped below by j so that MD(j) >= j for every cap.
    """

    kind: MdKind = MdKind.TAMED_EXP
    cap: int = 1 << 20

    DOUBLE_EXP_LIMIT = 5

    def __call__(self, j: int) -> int:
        if j < 0:
            raise ValueError("MD is defined on nonnegative indices")
        if self.kind is MdKind.TAMED_EXP:
            return max(j, min(1 << j, self.cap))
        if self.kind is MdKind.QUADRATIC:
            return max(j, min(j * j, self.cap))
        if j > self.DOUBLE_EXP_LIMIT:
            raise PreconditionFailed(f"2^(2^{j}) is not evaluable")
        return 1 << (1 << j)

    def capped(self, j: int) -> bool:
        """True when the cap, not the growth rule, sets MD(j)."""
        if self.kind is MdKind.PAPER_DOUBLE_EXP:
            return False
        raw = 1 << j if self.kind is MdKind.TAMED_EXP else j * j
        return self(j) < raw

    @classmethod
    def from_name(cls, name, cap=1 << 20):
        for kind in MdKind:
            if kind.value.lower() == name.lower():
                return cls(kind, cap)
        raise ValueError(f"unknown MD function {name!r}")

    def smallest_covering(self, i: int) -> int:
        """Smallest j >= 1 with MD(j) >= i."""
        j = 1
        while self(j) < i:
            j += 1
        return j

    @property
    def name(self):
        return self.kind.value

    def to_dict(self):
        return {'md': self.kind.value, 'cap': self.cap}


class Tape:
    """Output tape and step meter handed to decompressors and compressors.

    Emitting past `cap` bits raises MdCapViolation before the bits land.
    """

    def __init__(self, j, cap=None):
        self.j = j
        self.cap = cap
        self.steps = 0
        self._out: List[str] = []
        self._length = 0

    def tick(self, n=1):
        self.steps += n

    def emit(self, bits):
        if self.cap is not None and self._length + len(bits) > self.cap:
            raise MdCapViolation(
                f"output would reach {self._length + len(bits)} bits at j={self.j}, cap {self.cap}",
                j=self.j, cap=self.cap)
        self._out.append(bits)
        self._length += len(bits)
        self.steps += len(bits)

    @property
    def output(self):
        return ''.join(self._out)

    def __len__(self):
        return self._length


Decompressor = Callable[[str, Tape], None]
Compressor = Callable[[str, Tape], List[str]]


@dataclass
class CompressionPair:
    """A (C, D, p) triple with its declared family and MD function.

    `program(j)` returns p[1..j]. `decompressor(bits, tape)` writes D(bits)
    onto the tape; `compressor(s, tape)` returns the candidate programs for
    the sequence prefix s. Rec pairs may leave the compressor out.
    """

    name: str
    decompressor: Decompressor
    program: Callable[[int], str]
    family: TimeBoundFamily
    md: MdFunction
    compressor: Optional[Compressor] = None
    sequence_id: str = 'S'

    def to_dict(self):
        return {
            'pair': self.name,
            'sequence': self.sequence_id,
            'family': self.family.label,
            **self.md.to_dict(),
            'has_compressor': self.compressor is not None,
        }


@dataclass(frozen=True)
class TraceEntry:
    j: int
    i: int
    steps: int

    def to_dict(self):
        return {'j': self.j, 'i': self.i, 'steps': self.steps}


@dataclass
class Trace:
    pair_id: str
    sequence_id: str
    md: MdFunction
    family: str
    calibration: int
    entries: List[TraceEntry] = field(default_factory=list)
    error: Optional[dict] = None

    def i_at(self, j):
        for entry in self.entries:
            if entry.j == j:
                return entry.i
        raise KeyError(j)

    def as_map(self):
        return {entry.j: entry.i for entry in self.entries}

    def covers(self, lo, hi):
        indices = {entry.j for entry in self.entries}
        return all(j in indices for j in range(lo, hi + 1))

    def header(self):
        return {
            'pair': self.pair_id,
            'sequence': self.sequence_id,
            'md': self.md.name,
            'cap': self.md.cap,
            'family': self.family,
            'calibration': self.calibration,
        }

    def to_jsonl(self, extra_header=None):
        header = {**self.header(), **(extra_header or {})}
        if self.error:
            header['error'] = self.error
        lines = [json.dumps(header, sort_keys=True)]
        lines.extend(json.dumps(entry.to_dict(), sort_keys=True) for entry in self.entries)
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_jsonl(cls, text):
        lines = [line for line in text.splitlines() if line.strip()]
        header = json.loads(lines[0])
        md = MdFunction.from_name(header['md'], header['cap'])
        trace = cls(header['pair'], header['sequence'], md, header['family'], header['calibration'])
        for line in lines[1:]:
            row = json.loads(line)
            trace.entries.append(TraceEntry(row['j'], row['i'], row['steps']))
        return trace


@dataclass(frozen=True)
class Violation:
    condition: str
    index: int
    detail: str

    def to_dict(self):
        return {'condition': self.condition, 'index': self.index, 'detail': self.detail}


@dataclass
class VerificationReport:
    pair_id: str
    decompression_ok: bool = True
    compression_ok: bool = True
    md_ok: bool = True
    monotone_ok: bool = True
    budget_ok: bool = True
    normalized: bool = True
    violations: List[Violation] = field(default_factory=list)

    @property
    def all_ok(self):
        return (self.decompression_ok and self.compression_ok and self.md_ok
                and self.monotone_ok and self.budget_ok)

    def fail(self, condition, index, detail):
        setattr(self, f"{condition}_ok", False)
        self.violations.append(Violation(condition, index, detail))

    def to_dict(self):
        return {
            'pair': self.pair_id,
            'decompression_ok': self.decompression_ok,
            'compression_ok': self.compression_ok,
            'md_ok': self.md_ok,
            'monotone_ok': self.monotone_ok,
            'budget_ok': self.budget_ok,
            'normalized': self.normalized,
            'all_ok': self.all_ok,
            'violations': [v.to_dict() for v in self.violations],
        }
