import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from src.models.compression import TimeBoundFamily
from src.utils.errors import NonDyadicValue


def dyadic_parts(value: Fraction):
    """(numerator, exponent) with value = numerator / 2^exponent."""
    value = Fraction(value)
    den = value.denominator
    if den & (den - 1):
        raise NonDyadicValue(f"{value} is not a dyadic rational")
    return value.numerator, den.bit_length() - 1


def bits_to_hex(w: str) -> str:
    if not w:
        return ''
    padded = w + '0' * (-len(w) % 4)
    return format(int(padded, 2), f'0{len(padded) // 4}x')


@dataclass
class Martingale:
    """A betting function over bit strings with exact rational values.

    Values are memoized; `eval_fn` must be deterministic.
    """

    name: str
    eval_fn: Callable[[str], Fraction]
    family: TimeBoundFamily = field(default_factory=lambda: TimeBoundFamily.poly(2))
    initial_capital: Optional[Fraction] = None
    _memo: Dict[str, Fraction] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.initial_capital is None:
            self.initial_capital = self('')

    def __call__(self, w: str) -> Fraction:
        value = self._memo.get(w)
        if value is None:
            value = Fraction(self.eval_fn(w))
            self._memo[w] = value
        return value

    def to_table(self, depth: int) -> List[dict]:
        """Values for every w with |w| <= depth, as exact dyadic rows."""
        rows = []
        frontier = ['']
        for _ in range(depth + 1):
            next_frontier = []
            for w in frontier:
                numerator, exponent = dyadic_parts(self(w))
                rows.append({'w': bits_to_hex(w), 'length': len(w),
                             'numerator': numerator, 'exponent': exponent})
                next_frontier.extend((w + '0', w + '1'))
            frontier = next_frontier
        return rows

    def to_dict(self):
        numerator, exponent = dyadic_parts(self.initial_capital)
        return {'martingale': self.name, 'family': self.family.label,
                'initial_capital': {'numerator': numerator, 'exponent': exponent}}


@dataclass(frozen=True)
class Bettor:
    """A strategy given by the fraction of capital it puts on the next bit
    being 0. Bettor martingales satisfy d(wb) = 2 * d(w) * share_b(w)."""

    name: str
    min_k: int
    share_on_zero: Callable[[str], Fraction]


@dataclass
class UniversalMartingale:
    k: int
    M: int
    bettors: List[Bettor]

    @property
    def weights(self):
        return [Fraction(1, 1 << m) for m in range(1, self.M + 1)]


@dataclass(frozen=True)
class ScheduleBlock:
    k: int
    l: int
    start: int
    length: int
    # Length the block would have had without truncation at the sequence end.
    full_length: int

    def to_dict(self):
        return {'k': self.k, 'l': self.l, 'start': self.start, 'length': self.length}


@dataclass
class DiagonalSchedule:
    blocks: List[ScheduleBlock] = field(default_factory=list)
    padding: Dict[tuple, int] = field(default_factory=dict)

    @property
    def total_length(self):
        return sum(block.length for block in self.blocks)

    def to_jsonl(self):
        lines = []
        for block in self.blocks:
            row = block.to_dict()
            row['padding'] = self.padding.get((block.k, block.l))
            lines.append(json.dumps(row, sort_keys=True))
        return '\n'.join(lines) + '\n'


@dataclass
class ConversionReport:
    """Outcome of checking one direction of the compressor/martingale
    correspondence on a sequence.

    `checkpoints` rows are (j, i, floor_log2 d(S[1..i]) or None when d = 0).
    `tightest` is the smallest constant for which the inequality would
    still hold at every checkpoint.
    `short` rows are (j, promised n, delivered i) where D came up short of
    the bits the code paid for; `uncovered` lists checkpoints the trace
    never reached. Both count as failures.
    `skipped` lists code lengths that earned no checkpoint; it is informative
    only.
    """

    direction: str
    constant: int
    checkpoints: List[tuple] = field(default_factory=list)
    failures: List[tuple] = field(default_factory=list)
    tightest: Optional[int] = None
    short: List[tuple] = field(default_factory=list)
    uncovered: List[int] = field(default_factory=list)
    skipped: List[int] = field(default_factory=list)

    @property
    def holds(self):
        return not self.failures and not self.short and not self.uncovered

    def to_dict(self):
        return {
            'direction': self.direction,
            'constant': self.constant,
            'holds': self.holds,
            'tightest_constant': self.tightest,
            'checkpoints': [list(row) for row in self.checkpoints],
            'failures': [list(row) for row in self.failures],
            'short': [list(row) for row in self.short],
            'uncovered': list(self.uncovered),
            'skipped': list(self.skipped),
        }
