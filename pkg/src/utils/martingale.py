"""Exact martingales: the bettor library, the truncated universal martingale,
both directions of the compressor/martingale correspondence and the
diagonal construction of a sequence no library bettor profits on."""
import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from src.models.bits import BitStringPrefix
from src.models.compression import CompressionPair, MdFunction, Tape, TimeBoundFamily, Trace
from src.models.martingale import (Bettor, ConversionReport, DiagonalSchedule,
                                   Martingale, ScheduleBlock, UniversalMartingale,
                                   dyadic_parts)
from src.utils.core import floor_log2
from src.utils.errors import PreconditionFailed, ScheduleMismatch

logger = logging.getLogger(__name__)

# Every bettor share is a multiple of 1/SHARE_UNIT.
SHARE_UNIT = 8
TABLE_SHARES = (Fraction(1, 4), Fraction(3, 8), Fraction(1, 2), Fraction(5, 8), Fraction(3, 4))
MAX_TABLE_CONTEXT = 6
HALF = Fraction(1, 2)


def fairness_violation(d: Martingale, depth: int) -> Optional[str]:
    """First w with |w| < depth where 2d(w) != d(w0) + d(w1), else None."""
    frontier = ['']
    for _ in range(depth):
        next_frontier = []
        for w in frontier:
            if 2 * d(w) != d(w + '0') + d(w + '1'):
                return w
            next_frontier.extend((w + '0', w + '1'))
        frontier = next_frontier
    return None


def fairness_check(d: Martingale, depth: int) -> bool:
    return fairness_violation(d, depth) is None


def constant_martingale(value=1) -> Martingale:
    return Martingale('constant', lambda w: Fraction(value), TimeBoundFamily.lin(1))


def table_martingale(name: str, values: Dict[str, Fraction]) -> Martingale:
    """Martingale read from an explicit table (KeyError outside it)."""
    return Martingale(name, lambda w: values[w])


# Bettor library ---------------------------------------------------------

def _constant_share(share):
    return lambda w: share


def _alternating_share(first, bias):
    second = '1' if first == '0' else '0'

    def share(w):
        expected = first if len(w) % 2 == 0 else second
        return bias if expected == '0' else 1 - bias
    return share


def _lagged_share(lag, bias, flip):
    def share(w):
        if len(w) < lag:
            return HALF
        expected = w[-lag]
        if flip:
            expected = '1' if expected == '0' else '0'
        return bias if expected == '0' else 1 - bias
    return share


def _context_share(context, seed):
    rng = random.Random(seed)
    table = {format(index, f'0{context}b'): rng.choice(TABLE_SHARES) for index in range(1 << context)}

    def share(w):
        if len(w) < context:
            return HALF
        return table[w[-context:]]
    return share


@lru_cache(maxsize=None)
def bettor_library(k: int) -> Tuple[Bettor, ...]:
    """Bettors available at order k, ordered so that library(k) is a prefix
    of library(k + 1)."""
    if k < 1:
        raise PreconditionFailed("bettor order must be positive")
    bettors = [
        Bettor('all-on-0', 1, _constant_share(Fraction(1))),
        Bettor('all-on-1', 1, _constant_share(Fraction(0))),
        Bettor('alternate-01', 1, _alternating_share('0', Fraction(3, 4))),
        Bettor('alternate-10', 1, _alternating_share('1', Fraction(3, 4))),
        Bettor('same-3/4', 1, _lagged_share(1, Fraction(3, 4), False)),
        Bettor('flip-3/4', 1, _lagged_share(1, Fraction(3, 4), True)),
        Bettor('same-7/8', 1, _lagged_share(1, Fraction(7, 8), False)),
        Bettor('flip-7/8', 1, _lagged_share(1, Fraction(7, 8), True)),
        Bettor('context-1', 1, _context_share(1, 1)),
    ]
    for order in range(2, k + 1):
        bettors.append(Bettor(f'repeat-{order}', order, _lagged_share(order, Fraction(3, 4), False)))
        bettors.append(Bettor(f'flip-{order}', order, _lagged_share(order, Fraction(3, 4), True)))
        if order <= MAX_TABLE_CONTEXT:
            bettors.append(Bettor(f'context-{order}', order, _context_share(order, order)))
    return tuple(bettors)


def bettor_martingale(bettor: Bettor) -> Martingale:
    """d(λ) = 1 and d(wb) = 2 d(w) share_b(w)."""
    cache = {'': Fraction(1)}

    def value(w):
        if w in cache:
            return cache[w]
        start = len(w)
        while w[:start] not in cache:
            start -= 1
        capital = cache[w[:start]]
        for index in range(start, len(w)):
            share = bettor.share_on_zero(w[:index])
            capital = capital * 2 * (share if w[index] == '0' else 1 - share)
            cache[w[:index + 1]] = capital
        return capital

    return Martingale(bettor.name, value, TimeBoundFamily.lin(1))


_library_martingales: Dict[str, Martingale] = {}


def library_martingale(bettor: Bettor) -> Martingale:
    if bettor.name not in _library_martingales:
        _library_martingales[bettor.name] = bettor_martingale(bettor)
    return _library_martingales[bettor.name]


def universal(k: int, M: int) -> UniversalMartingale:
    bettors = bettor_library(k)
    if M < 1 or M > len(bettors):
        raise PreconditionFailed(f"order {k} enumerates {len(bettors)} bettors, M={M} requested")
    return UniversalMartingale(k, M, list(bettors[:M]))


def universal_eval(k: int, M: int, w: str) -> Fraction:
    """Σ_{m <= M} 2^-m bettor_m(w)."""
    mixture = universal(k, M)
    return sum((weight * library_martingale(bettor)(w)
                for weight, bettor in zip(mixture.weights, mixture.bettors)), Fraction(0))


def universal_martingale(k: int, M: int) -> Martingale:
    return Martingale(f"universal-k{k}-M{M}", lambda w: universal_eval(k, M, w), TimeBoundFamily.poly(k))


def mixture_martingale(name: str, bettors, weights) -> Martingale:
    """Nonnegative dyadic combination of library bettors."""
    pairs = [(Fraction(weight), library_martingale(bettor)) for bettor, weight in zip(bettors, weights)]
    return Martingale(name, lambda w: sum((weight * d(w) for weight, d in pairs), Fraction(0)))


def savings_martingale(d: Martingale) -> Martingale:
    """Capital-locking version of d.

    Whenever the capital still in play reaches 2 d(λ), half of it moves to a
    savings account that is never bet again. Savings never decrease along a
    path and each lock adds at least d(λ) to them. Since d at most doubles per
    bit, the capital in play stays below 2 d(λ) after every lock.
    """
    base = d('')
    # w -> (locks so far, savings)
    states: Dict[str, Tuple[int, Fraction]] = {'': (0, Fraction(0))}

    def state(w):
        start = len(w)
        while w[:start] not in states:
            start -= 1
        locks, saved = states[w[:start]]
        for n in range(start + 1, len(w) + 1):
            in_play = d(w[:n]) / (1 << locks)
            if base > 0 and in_play >= 2 * base:
                locks += 1
                saved += in_play / 2
            states[w[:n]] = (locks, saved)
        return locks, saved

    def value(w):
        locks, saved = state(w)
        return saved + d(w) / (1 << locks)

    return Martingale(f"savings[{d.name}]", value, d.family)


# Martingale -> compressor -------------------------------------------------

class ArithmeticCoder:
    """Interval coding of strings under the measure μ(u) = d(u) 2^-|u| / d(λ).

    Fairness of d makes μ additive, so the intervals I(u0), I(u1) split I(u).
    """

    def __init__(self, d: Martingale):
        self.d = d
        self.base = d('')
        if self.base <= 0:
            raise PreconditionFailed(f"{d.name} starts with no capital")
        self._lows = {'': Fraction(0)}

    def measure(self, u: str) -> Fraction:
        dyadic_parts(self.d(u))
        return self.d(u) / (self.base * (1 << len(u)))

    def interval(self, u: str) -> Tuple[Fraction, Fraction]:
        if u not in self._lows:
            low, _ = self.interval(u[:-1])
            if u[-1] == '1':
                low += self.measure(u[:-1] + '0')
            self._lows[u] = low
        low = self._lows[u]
        return low, low + self.measure(u)

    def encode(self, u: str) -> str:
        """Shortest q whose dyadic cell [0.q, 0.q + 2^-|q|) lies inside I(u)."""
        low, high = self.interval(u)
        if high <= low:
            raise PreconditionFailed(f"{self.d.name} gives the sequence zero measure")
        length = 0
        while True:
            scale = 1 << length
            cell = math.ceil(low * scale)
            if Fraction(cell + 1, scale) <= high:
                return format(cell, f'0{length}b') if length else ''
            length += 1

    def pins(self, q: str, u: str) -> bool:
        """True when the cell of q lies inside I(u)."""
        low, high = self.interval(u)
        cell_low = Fraction(int(q, 2) if q else 0, 1 << len(q))
        return low <= cell_low and cell_low + Fraction(1, 1 << len(q)) <= high

    def decode(self, q: str, limit: int, tape: Tape = None) -> str:
        """Longest u with |u| <= limit whose interval contains the cell of q."""
        cell_low = Fraction(int(q, 2) if q else 0, 1 << len(q))
        cell_high = cell_low + Fraction(1, 1 << len(q))
        u = ''
        low = Fraction(0)
        while len(u) < limit:
            if tape is not None:
                tape.tick(len(u) + 1)
            middle = low + self.measure(u + '0')
            high = low + self.measure(u)
            if low <= cell_low and cell_high <= middle:
                u += '0'
            elif middle <= cell_low and cell_high <= high:
                u += '1'
                low = middle
            else:
                break
        return u


def code_checkpoints(coder: ArithmeticCoder, program, w: BitStringPrefix,
                     md: MdFunction) -> List[Tuple[int, int]]:
    """(j, n) pairs the interval code pays for.

    For each prefix length n, j is the shortest program prefix (at least 1)
    whose cell lies inside I(w[1..n]). The pair is emitted when that prefix
    is within two bits of the interval's size, j <= -floor(log2 μ) + 2, and
    MD(j) >= n; for each j only the largest such n is kept. Nothing here
    looks at a trace.
    """
    paid: Dict[int, int] = {}
    j = 0
    for n in range(1, len(w) + 1):
        u = w.upto(n)
        while not coder.pins(program(j), u):
            j += 1
        length = max(1, j)
        if length <= 2 - floor_log2(coder.measure(u)) and md(length) >= n:
            paid[length] = n
    return sorted(paid.items())


def martingale_to_compressor(d: Martingale, md: MdFunction, w: BitStringPrefix,
                             savings: bool = False) -> CompressionPair:
    """Compression pair for w out of the capital d gains along it.

    p is the interval code of all of w padded with zeros; D descends the
    interval tree as far as the cell of its input allows, capped at MD(j).
    With `savings` the code is built from savings_martingale(d).
    """
    coding = savings_martingale(d) if savings else d
    coder = ArithmeticCoder(coding)
    horizon = len(w)
    core = coder.encode(w.bits)

    def program(j):
        return (core + '0' * max(0, j - len(core)))[:j]

    def decompressor(bits, tape):
        tape.emit(coder.decode(bits, min(horizon, md(len(bits))), tape))

    def compressor(s, tape):
        for j in range(1, len(core) + horizon + 1):
            tape.tick(j)
            if coder.decode(program(j), min(horizon, md(j))).startswith(s):
                return [program(j)]
        return []

    pair = CompressionPair(f"arith[{coding.name}]", decompressor, program, TimeBoundFamily.poly(2), md,
                           compressor, w.role)
    pair.coder = coder
    pair.martingale = coding
    return pair


def check_martingale_to_compressor(d: Martingale, trace: Trace, w: BitStringPrefix,
                                   constant: int = 4) -> ConversionReport:
    """D delivers what the code paid for, and there
    i - j >= floor(log2 d(w[1..i])) - constant.

    Checkpoints come from code_checkpoints on the interval code of w under d,
    never from the traced i. A checkpoint the trace misses or where D stops
    short of n is a failure. Code lengths with no checkpoint are listed in
    `skipped`. The inequality is vacuous where d(w[1..i]) < 1;
    the constant absorbs log2 d(λ) up to d(λ) = 4.
    """
    coder = ArithmeticCoder(d)
    core = coder.encode(w.bits)

    def program(j):
        return (core + '0' * max(0, j - len(core)))[:j]

    observed = trace.as_map()
    report = ConversionReport('martingale-to-compressor', constant)
    emitted = code_checkpoints(coder, program, w, trace.md)
    paid_for = {j for j, _ in emitted}
    report.skipped = [j for j in range(1, len(core) + 1) if j not in paid_for]
    for j, n in emitted:
        i = observed.get(j)
        if i is None:
            report.uncovered.append(j)
            continue
        value = d(w.upto(i))
        log_d = floor_log2(value) if value > 0 else None
        report.checkpoints.append((j, i, log_d))
        if i < n:
            report.short.append((j, n, i))
            continue
        if value < 1:
            continue
        gap = log_d - (i - j)
        report.tightest = gap if report.tightest is None else max(report.tightest, gap)
        if gap > constant:
            report.failures.append((j, i, log_d))
    if report.short or report.uncovered:
        logger.warning("%s: short %s uncovered %s", d.name, report.short, report.uncovered)
    return report


# Compressor -> martingale -------------------------------------------------

def compressor_to_martingale(pair: CompressionPair, horizon: int) -> Martingale:
    """Martingale betting on what the decompressor can still produce.

    M(w) sums 2^-|q| over the minimal q (|q| <= horizon) with D(q) ⊒ w. M is
    a semimeasure; spreading its deficit evenly over both children gives a
    fair measure μ >= M, and d(w) = 2^|w| μ(w).
    """
    outputs: Dict[str, str] = {'': ''}
    mass: Dict[str, Fraction] = {}
    measure: Dict[str, Fraction] = {'': Fraction(1)}

    def decompress(q):
        if q not in outputs:
            tape = Tape(len(q), pair.md(len(q)))
            pair.decompressor(q, tape)
            outputs[q] = tape.output
        return outputs[q]

    def covering_mass(w):
        if w in mass:
            return mass[w]
        total = Fraction(0)
        stack = ['']
        while stack:
            q = stack.pop()
            out = decompress(q)
            if out.startswith(w):
                total += Fraction(1, 1 << len(q))
            elif w.startswith(out) and len(q) < horizon:
                stack.extend((q + '1', q + '0'))
        mass[w] = total
        return total

    def mu(w):
        if w not in measure:
            parent = w[:-1]
            deficit = mu(parent) - covering_mass(parent + '0') - covering_mass(parent + '1')
            measure[w] = covering_mass(w) + deficit / 2
        return measure[w]

    return Martingale(f"from[{pair.name}]", lambda w: mu(w) * (1 << len(w)), pair.family)


def check_compressor_to_martingale(d: Martingale, trace: Trace, S: BitStringPrefix,
                                   constant: int = 2) -> ConversionReport:
    """floor(log2 d(S[1..i_j])) >= i_j - j - constant at every traced j."""
    report = ConversionReport('compressor-to-martingale', constant)
    for entry in trace.entries:
        value = d(S.upto(entry.i))
        log_d = floor_log2(value) if value > 0 else None
        report.checkpoints.append((entry.j, entry.i, log_d))
        if log_d is None:
            report.failures.append((entry.j, entry.i, None))
            continue
        gap = (entry.i - entry.j) - log_d
        report.tightest = gap if report.tightest is None else max(report.tightest, gap)
        if gap > constant:
            report.failures.append((entry.j, entry.i, log_d))
    return report


# Diagonal construction ----------------------------------------------------

def diagonal_schedule(length: int, md: MdFunction) -> DiagonalSchedule:
    """Blocks S_1^1 S_1^2 S_2^2 S_1^3 ... with |S_1^1| = 1 and
    |S_k^l| = MD(MD(b)) for the b bits before the block; the last block is
    cut at `length`."""
    schedule = DiagonalSchedule()
    position = 0
    level = 1
    while position < length:
        for k in range(1, level + 1):
            if position >= length:
                break
            full = 1 if not schedule.blocks else md(md(position))
            size = min(full, length - position)
            schedule.blocks.append(ScheduleBlock(k, level, position + 1, size, full))
            position += size
        level += 1
    return schedule


class DiagonalState:
    """Running capitals of every library bettor along a growing prefix.

    Capitals are kept as integers over the common denominator 4^|w|: one
    bit multiplies capital by 2 * share = (SHARE_UNIT * share) / 4.
    """

    def __init__(self, k_max: int):
        self.bettors = bettor_library(k_max)
        self.sizes = {k: len(bettor_library(k)) for k in range(1, k_max + 1)}
        self.numerators = [1] * len(self.bettors)
        self.w = ''

    def _units(self):
        units = []
        for bettor in self.bettors:
            scaled = bettor.share_on_zero(self.w) * SHARE_UNIT
            if scaled.denominator != 1:
                raise PreconditionFailed(f"{bettor.name} bets a share finer than 1/{SHARE_UNIT}")
            units.append(int(scaled))
        return units

    def _weighted(self, k, numerators):
        size = self.sizes[k]
        return sum(numerators[m] << (size - 1 - m) for m in range(size))

    def value(self, k) -> Fraction:
        """d_k(w) = Σ_{m <= M_k} 2^-m capital_m(w)."""
        size = self.sizes[k]
        return Fraction(self._weighted(k, self.numerators), (1 << size) * (4 ** len(self.w)))

    def choose(self, k):
        """The bit on which d_k does not grow; 0 on ties."""
        units = self._units()
        current = 4 * self._weighted(k, self.numerators)
        on_zero = self._weighted(k, [n * u for n, u in zip(self.numerators, units)])
        return ('0' if on_zero <= current else '1'), units

    def push(self, bit, units=None):
        units = units or self._units()
        if bit == '0':
            self.numerators = [n * u for n, u in zip(self.numerators, units)]
        else:
            self.numerators = [n * (SHARE_UNIT - u) for n, u in zip(self.numerators, units)]
        self.w += bit


@dataclass
class DiagonalResult:
    prefix: BitStringPrefix
    schedule: DiagonalSchedule
    nonincreasing: bool = True
    # (k, l, d_k at block start, d_k at block end)
    block_values: List[tuple] = field(default_factory=list)

    def to_dict(self):
        return {
            'length': len(self.prefix),
            'nonincreasing': self.nonincreasing,
            'blocks': [
                {**block.to_dict(), 'start_value': str(start), 'end_value': str(end)}
                for block, (_, _, start, end) in zip(self.schedule.blocks, self.block_values)
            ],
        }


def diagonal_sequence(length: int, md: MdFunction) -> DiagonalResult:
    """Within block S_k^l every bit is chosen so that d_k does not increase."""
    schedule = diagonal_schedule(length, md)
    k_max = max(block.k for block in schedule.blocks)
    state = DiagonalState(k_max)
    result = DiagonalResult(None, schedule)
    for block in schedule.blocks:
        start = state.value(block.k)
        for _ in range(block.length):
            before = state.value(block.k)
            bit, units = state.choose(block.k)
            state.push(bit, units)
            if state.value(block.k) > before:
                result.nonincreasing = False
        result.block_values.append((block.k, block.l, start, state.value(block.k)))
        logger.debug("diagonal block (%d, %d) of %d bits done", block.k, block.l, block.length)
    result.prefix = BitStringPrefix(state.w, 'diagonal')
    return result


@dataclass
class PaddedStream:
    k: int
    bits: str
    # (k, l) -> designated checkpoint j(k, l)
    checkpoints: Dict[tuple, int]
    pair: CompressionPair


def _check_schedule(S: BitStringPrefix, schedule: DiagonalSchedule, md: MdFunction):
    expected = diagonal_schedule(len(S), md)
    if schedule.total_length != len(S):
        raise ScheduleMismatch(f"schedule covers {schedule.total_length} bits, sequence has {len(S)}")
    if [(b.k, b.l, b.start, b.length) for b in schedule.blocks] != \
            [(b.k, b.l, b.start, b.length) for b in expected.blocks]:
        raise ScheduleMismatch("block sizes do not follow MD(MD(b)) for this MD function")


def padded_program_stream(S: BitStringPrefix, schedule: DiagonalSchedule, k: int,
                          md: MdFunction) -> PaddedStream:
    """p = S with every S_k^l replaced by j'(k, l) zeros; its decompressor
    regenerates those blocks by replaying the d_k-greedy rule."""
    _check_schedule(S, schedule, md)
    if not any(block.k == k for block in schedule.blocks):
        raise ScheduleMismatch(f"no block of order {k} in the schedule")
    k_max = max(block.k for block in schedule.blocks)

    parts = []
    checkpoints = {}
    used = 0
    for block in schedule.blocks:
        before = block.start - 1
        if block.k == k:
            room = md(before) - used
            if room < 0:
                raise ScheduleMismatch(f"negative padding at block ({block.k}, {block.l})")
            padding = max(1, room)
            schedule.padding[(block.k, block.l)] = padding
            parts.append('0' * padding)
            used += padding
            checkpoints[(block.k, block.l)] = used
        else:
            parts.append(S.bits[before:before + block.length])
            used += block.length
    bits = ''.join(parts)

    def program(j):
        return (bits + '0' * max(0, j - len(bits)))[:j]

    pair = CompressionPair(f"diagonal-padded-k{k}", PaddedReplay(schedule, k, k_max, md), program,
                           TimeBoundFamily.poly(k + 1), md, None, 'diagonal')
    return PaddedStream(k, bits, checkpoints, pair)


class PaddedReplay:
    """Decompressor of a padded stream.

    Blocks of order k are regenerated by the d_k-greedy rule once their
    padding has been read; every other block is copied from the program.
    A query that extends the bits consumed by the previous one resumes from
    where that query stopped; step counts still cover the whole replay.
    """

    def __init__(self, schedule: DiagonalSchedule, k: int, k_max: int, md: MdFunction):
        self.schedule = schedule
        self.k = k
        self.k_max = k_max
        self.md = md
        self._reset()

    def _reset(self):
        self.state = DiagonalState(self.k_max)
        self.block_index = 0
        self.offset = 0
        self.read = 0
        self.padded = False
        self.consumed = ''
        self.steps = 0

    def __call__(self, q: str, tape: Tape):
        want = self.md(len(q))
        if not q.startswith(self.consumed):
            self._reset()
        blocks = self.schedule.blocks
        cost = len(self.state.bettors)
        while len(self.state.w) < want and self.block_index < len(blocks):
            block = blocks[self.block_index]
            if block.k == self.k:
                if not self.padded:
                    padding = max(1, self.md(block.start - 1) - self.read)
                    if self.read + padding > len(q):
                        break
                    self.read += padding
                    self.padded = True
                bit, units = self.state.choose(self.k)
                self.state.push(bit, units)
            else:
                if self.read >= len(q):
                    break
                self.state.push(q[self.read])
                self.read += 1
            self.steps += cost
            self.offset += 1
            if self.offset == block.length:
                self.block_index += 1
                self.offset = 0
                self.padded = False
        self.consumed = q[:self.read]
        tape.tick(self.steps)
        tape.emit(self.state.w[:want])


@dataclass(frozen=True)
class DesignatedCheck:
    k: int
    l: int
    j: int
    i: int
    md_j: int

    @property
    def ok(self):
        return self.i >= self.md_j

    def to_dict(self):
        return {'k': self.k, 'l': self.l, 'j': self.j, 'i': self.i, 'md_j': self.md_j, 'ok': self.ok}


def designated_blocks(stream: PaddedStream, schedule: DiagonalSchedule) -> List[Tuple[ScheduleBlock, int]]:
    """(block, j(k, l)) for every padded block that carries a guarantee.

    The opening block (1, 1) and blocks cut short at the sequence end are
    left out.
    """
    designated = []
    for block in schedule.blocks:
        key = (block.k, block.l)
        if key not in stream.checkpoints or key == (1, 1) or block.length < block.full_length:
            continue
        designated.append((block, stream.checkpoints[key]))
    return designated


def designated_checks(stream: PaddedStream, schedule: DiagonalSchedule, trace: Trace) -> List[DesignatedCheck]:
    """i_j >= MD(j) at each designated checkpoint j(k, l) the trace reached."""
    observed = trace.as_map()
    return [DesignatedCheck(block.k, block.l, j, observed[j], stream.pair.md(j))
            for block, j in designated_blocks(stream, schedule) if j in observed]
