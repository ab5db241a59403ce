"""Running, tracing and verifying compression pairs, plus the built-in pairs."""
import logging
import math
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Dict, List, Tuple, Union

from src.models.bits import BitStringPrefix, LanguageDecider
from src.models.complexity import RandomnessThreshold
from src.models.compression import (CompressionPair, MdFunction, Tape,
                                    TimeBoundFamily, Trace, TraceEntry,
                                    VerificationReport)
from src.utils.complexity import DEFAULT_MAX_SIEVE_INDEX, _rkt_sieve, rkt_char_prefix
from src.utils.core import char_prefix, string_index
from src.utils.errors import (BudgetExceeded, DepthLabError, MdCapViolation,
                              PreconditionFailed)
from src.utils.halting_table import HaltingTable
from src.utils.utm import DEFAULT_ENUMERATION_CEILING

logger = logging.getLogger(__name__)

DEFAULT_CALIBRATION = 16
DEFAULT_CANDIDATE_LIMIT = 64

SequenceSource = Union[BitStringPrefix, Callable[[int], str]]


def _step_limit(pair, n, calibration):
    bound = pair.family.bound(n)
    return None if bound is None else calibration * bound


def run_decompressor(pair: CompressionPair, j: int, calibration: int = DEFAULT_CALIBRATION,
                     enforce_budget: bool = True) -> Tuple[str, int]:
    """D(p[1..j]) and its step count, under the MD(j) output cap."""
    bits = pair.program(j)
    if len(bits) < j:
        raise PreconditionFailed(f"program stream of {pair.name} ends after {len(bits)} bits")
    tape = Tape(j, cap=pair.md(j))
    pair.decompressor(bits, tape)
    output = tape.output
    limit = _step_limit(pair, len(output) + j, calibration)
    if enforce_budget and limit is not None and tape.steps > limit:
        raise BudgetExceeded(f"{pair.name}: D took {tape.steps} steps at j={j}, allowed {limit}",
                             steps=tape.steps, budget=limit)
    return output, tape.steps


def run_compressor(pair: CompressionPair, s_prefix: BitStringPrefix, calibration: int = DEFAULT_CALIBRATION,
                   candidate_limit: int = DEFAULT_CANDIDATE_LIMIT) -> List[str]:
    """Candidate programs C(S[1..i])."""
    if pair.compressor is None:
        raise PreconditionFailed(f"{pair.name} declares {pair.family.label} and has no compressor")
    tape = Tape(len(s_prefix))
    candidates = pair.compressor(s_prefix.bits, tape)
    limit = _step_limit(pair, len(s_prefix), calibration)
    if limit is not None and tape.steps > limit:
        raise BudgetExceeded(f"{pair.name}: C took {tape.steps} steps at i={len(s_prefix)}, allowed {limit}",
                             steps=tape.steps, budget=limit)
    if len(candidates) > candidate_limit:
        raise BudgetExceeded(f"{pair.name}: {len(candidates)} candidates, limit {candidate_limit}",
                             steps=len(candidates), budget=candidate_limit)
    return candidates


def capture_trace(pair: CompressionPair, j_max: int, calibration: int = DEFAULT_CALIBRATION) -> Trace:
    trace = Trace(pair.name, pair.sequence_id, pair.md, pair.family.label, calibration)
    previous = ''
    for j in range(1, j_max + 1):
        try:
            output, steps = run_decompressor(pair, j, calibration)
        except DepthLabError as err:
            trace.error = {'j': j, 'error': type(err).__name__, 'message': str(err)}
            err.trace = trace
            raise
        if not output.startswith(previous):
            trace.error = {'j': j, 'error': 'NotMonotone', 'message': 'output does not extend the previous one'}
            err = PreconditionFailed(f"{pair.name}: D(p[1..{j}]) does not extend D(p[1..{j - 1}])")
            err.trace = trace
            raise err
        trace.entries.append(TraceEntry(j, len(output), steps))
        previous = output
    logger.debug("traced %s to j=%d, final i=%d", pair.name, j_max, len(previous))
    return trace


def verify_pair(pair: CompressionPair, S: BitStringPrefix, i_max: int, j_max: int,
                calibration: int = DEFAULT_CALIBRATION,
                candidate_limit: int = DEFAULT_CANDIDATE_LIMIT) -> VerificationReport:
    """Check both Δ-compression conditions, the MD cap, step budgets and
    monotonicity. Failures land in the report."""
    if len(S) < i_max:
        raise PreconditionFailed(f"sequence has {len(S)} bits, i_max is {i_max}")
    report = VerificationReport(pair.name)
    decoded: Dict[int, str] = {}

    def decompress(j):
        if j not in decoded:
            decoded[j] = run_decompressor(pair, j, calibration, enforce_budget=False)[0]
        return decoded[j]

    previous = ''
    for j in range(1, j_max + 1):
        try:
            output, steps = run_decompressor(pair, j, calibration, enforce_budget=False)
        except MdCapViolation as err:
            report.fail('md', j, str(err))
            continue
        except DepthLabError as err:
            report.fail('decompression', j, f"{type(err).__name__}: {err}")
            continue
        decoded[j] = output
        i = len(output)
        seen = output[:len(S)]
        if not S.bits.startswith(seen):
            first = next(k for k in range(len(seen)) if seen[k] != S.bits[k]) + 1
            report.fail('decompression', j, f"output differs from S at bit {first}")
        if i > pair.md(j):
            report.fail('md', j, f"i={i} exceeds MD({j})={pair.md(j)}")
        limit = _step_limit(pair, i + j, calibration)
        if limit is not None and steps > limit:
            report.fail('budget', j, f"{steps} steps, allowed {limit}")
        if not output.startswith(previous):
            report.fail('monotone', j, "output does not extend the previous one")
        if 2 * i < j:
            report.normalized = False
        previous = output

    if pair.compressor is not None:
        for i in range(1, i_max + 1):
            s_prefix = BitStringPrefix(S.upto(i), S.role)
            try:
                candidates = run_compressor(pair, s_prefix, calibration, candidate_limit)
            except BudgetExceeded as err:
                report.fail('budget', i, f"compressor: {err}")
                continue
            witness = False
            for candidate in candidates:
                if pair.program(len(candidate)) != candidate:
                    continue
                try:
                    if decompress(len(candidate)).startswith(s_prefix.bits):
                        witness = True
                        break
                except DepthLabError:
                    continue
            if not witness:
                report.fail('compression', i, f"none of {len(candidates)} candidates decompresses to S[1..{i}]")
    logger.info("verified %s: all_ok=%s, %d violations", pair.name, report.all_ok, len(report.violations))
    return report


def corrupt_decompressor(pair: CompressionPair, position: int = 5) -> CompressionPair:
    """Fault injection: the returned pair flips output bit `position`."""
    inner = pair.decompressor

    def decompressor(bits, tape):
        scratch = Tape(tape.j, tape.cap)
        inner(bits, scratch)
        output = scratch.output
        if len(output) >= position:
            flipped = '1' if output[position - 1] == '0' else '0'
            output = output[:position - 1] + flipped + output[position:]
        tape.tick(scratch.steps - len(output))
        tape.emit(output)

    return replace(pair, name=f"{pair.name}+flip{position}", decompressor=decompressor)


def _source_bits(source: SequenceSource, n: int) -> str:
    if isinstance(source, BitStringPrefix):
        if n > len(source):
            raise PreconditionFailed(f"sequence {source.role} has only {len(source)} bits, {n} requested")
        return source.upto(n)
    return source(n)


def _zeros(j):
    return '0' * j


def _minimal_zero_program(md: MdFunction):
    def compressor(s, tape):
        j = md.smallest_covering(len(s))
        tape.tick(j)
        return ['0' * j]
    return compressor


def builtin_identity(S: SequenceSource, md: MdFunction = MdFunction(), sequence_id: str = None) -> CompressionPair:
    """p = S, C(x) = D(x) = x."""
    def decompressor(bits, tape):
        tape.emit(bits)

    def compressor(s, tape):
        tape.tick(len(s))
        return [s]

    seq = sequence_id or (S.role if isinstance(S, BitStringPrefix) else 'S')
    return CompressionPair('identity', decompressor, lambda j: _source_bits(S, j),
                           TimeBoundFamily.lin(1), md, compressor, seq)


def builtin_optimal(L: LanguageDecider, md: MdFunction) -> CompressionPair:
    """p = 0^∞ and D(0^j) = χ_L[1..MD(j)]."""
    def decompressor(bits, tape):
        for m in range(1, md(len(bits)) + 1):
            x = string_index(m - 1)
            bit, steps = L.decide(x)
            if steps > L.budget(len(x)):
                raise BudgetExceeded(f"decider {L.name} overran its budget on {x!r}",
                                     steps=steps, budget=L.budget(len(x)))
            tape.tick(steps)
            tape.emit('1' if bit else '0')

    return CompressionPair(f"optimal-{L.name}", decompressor, _zeros, TimeBoundFamily.poly(2), md,
                           _minimal_zero_program(md), f"chi_{L.name}")


def builtin_rkt(md: MdFunction, max_index: int = DEFAULT_MAX_SIEVE_INDEX,
                ceiling: int = DEFAULT_ENUMERATION_CEILING) -> CompressionPair:
    """p = 0^∞ and D(0^j) = R_Kt[1..MD(j)] by the bounded sieve."""
    def decompressor(bits, tape):
        i = md(len(bits))
        if i > max_index:
            raise PreconditionFailed(f"MD({len(bits)}) = {i} exceeds the sieve limit {max_index}")
        prefix, work = _rkt_sieve(i, ceiling)
        tape.tick(work)
        tape.emit(prefix)

    return CompressionPair('rkt', decompressor, _zeros, TimeBoundFamily.poly(3), md,
                           _minimal_zero_program(md), 'R_Kt')


def rke_output_length(j: int, epsilon: Fraction, md: MdFunction) -> int:
    """Bits emitted from j program bits: the full characteristic block for
    lengths <= ⌊j/ε⌋, clipped to MD(j)."""
    return min(md(j), (1 << (math.floor(j / epsilon) + 1)) - 1)


def builtin_rke(thr: RandomnessThreshold, table: HaltingTable, md: MdFunction) -> CompressionPair:
    """p = binary expansion of Ω̂. D reads ⌈ε⌊j/ε⌋⌉ <= j bits of it, dovetails
    the table until that much halting mass has appeared, and then knows every
    short program that halts within T_max."""
    epsilon = thr.epsilon

    def decompressor(bits, tape):
        j = len(bits)
        top = math.floor(j / epsilon)
        m = math.ceil(epsilon * top)
        table.complete_below(m)
        mass = Fraction(int(bits[:m], 2) if m else 0, 1 << m)
        found, work = table.dovetail(mass)
        tape.tick(work)
        for position in range(1, rke_output_length(j, epsilon, md) + 1):
            x = string_index(position - 1)
            known = found.get(x)
            member = known is None or known >= thr.threshold(len(x))
            tape.emit('1' if member else '0')

    return CompressionPair('rke', decompressor, table.omega_bits, TimeBoundFamily.rec(), md,
                           None, f"R_K,{epsilon}")


def native_sequence(pair_name: str, length: int, decider: LanguageDecider = None,
                    thr: RandomnessThreshold = None, table: HaltingTable = None) -> BitStringPrefix:
    """The sequence a built-in pair compresses, materialized to `length` bits."""
    if pair_name == 'rkt':
        return rkt_char_prefix(length)
    if pair_name == 'rke':
        return table.rke_char_prefix(length, thr)
    if pair_name.startswith('optimal'):
        return char_prefix(decider, length)
    raise PreconditionFailed(f"no native sequence for {pair_name}")
