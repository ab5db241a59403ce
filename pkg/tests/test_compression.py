from fractions import Fraction

import pytest

from src.models.bits import DECIDERS, BitStringPrefix
from src.models.compression import (CompressionPair, FamilyKind, MdFunction, MdKind, Tape,
                                    TimeBoundFamily, Trace)
from src.utils.compression import (builtin_identity, builtin_optimal, builtin_rke, builtin_rkt,
                                   capture_trace, corrupt_decompressor, native_sequence,
                                   rke_output_length, run_compressor, run_decompressor, verify_pair)
from src.utils.core import char_prefix
from src.utils.errors import BudgetExceeded, MdCapViolation, PreconditionFailed

SAMPLE = BitStringPrefix('0110100110010110' * 4, 'thue')


def test_md_functions():
    tamed = MdFunction(MdKind.TAMED_EXP, 1024)
    assert [tamed(j) for j in (0, 1, 3, 10, 11, 2000)] == [1, 2, 8, 1024, 1024, 2000]
    quadratic = MdFunction(MdKind.QUADRATIC, 100)
    assert [quadratic(j) for j in (1, 5, 12)] == [1, 25, 100]
    double = MdFunction(MdKind.PAPER_DOUBLE_EXP)
    assert double(3) == 256
    with pytest.raises(PreconditionFailed):
        double(6)
    assert tamed.smallest_covering(64) == 6
    assert MdFunction.from_name('quadratic', 100) == quadratic
    with pytest.raises(ValueError):
        MdFunction.from_name('cubic')


def test_family_bounds():
    assert TimeBoundFamily.lin(3).bound(10) == 30
    assert TimeBoundFamily.poly(2).bound(10) == 200
    assert TimeBoundFamily.polylog(2).bound(10) == 16
    assert TimeBoundFamily.rec().bound(10) is None
    assert TimeBoundFamily.rec(lambda n: n + 1).bound(10) == 11
    assert TimeBoundFamily.poly(3).label == 'Poly(k=3)'
    with pytest.raises(ValueError):
        TimeBoundFamily(FamilyKind.LIN, 0)


def test_tape_enforces_the_cap():
    tape = Tape(2, cap=4)
    tape.emit('010')
    with pytest.raises(MdCapViolation) as info:
        tape.emit('11')
    assert info.value.cap == 4
    assert tape.output == '010'
    assert tape.steps == 3


def test_identity_pair_verifies(md):
    pair = builtin_identity(SAMPLE, md)
    report = verify_pair(pair, SAMPLE, 32, 32)
    assert report.all_ok
    assert report.normalized
    assert run_compressor(pair, BitStringPrefix(SAMPLE.upto(5))) == [SAMPLE.upto(5)]


def test_corrupted_decompressor_is_caught(md):
    pair = corrupt_decompressor(builtin_identity(SAMPLE, md), position=5)
    report = verify_pair(pair, SAMPLE, 16, 16)
    assert not report.decompression_ok
    assert not report.compression_ok
    first = report.violations[0]
    assert first.condition == 'decompression'
    assert first.index == 5
    assert 'bit 5' in first.detail


def test_optimal_pair_outputs_md_bits(md):
    pair = builtin_optimal(DECIDERS['even'], md)
    S = char_prefix(DECIDERS['even'], 64)
    output, _ = run_decompressor(pair, 6)
    assert output == S.bits
    assert verify_pair(pair, S, 64, 6).all_ok


def test_rkt_pair_verifies(md):
    pair = builtin_rkt(md)
    S = native_sequence('rkt', 64)
    assert verify_pair(pair, S, 64, 6).all_ok
    trace = capture_trace(pair, 6)
    assert [entry.i for entry in trace.entries] == [2, 4, 8, 16, 32, 64]


def test_rke_pair_verifies(md, small_table, half_threshold):
    pair = builtin_rke(half_threshold, small_table, md)
    assert pair.family.kind is FamilyKind.REC
    S = native_sequence('rke', 256, thr=half_threshold, table=small_table)
    report = verify_pair(pair, S, 256, 8)
    assert report.all_ok
    with pytest.raises(PreconditionFailed):
        run_compressor(pair, BitStringPrefix('1'))


def test_rke_output_length_is_clipped():
    md = MdFunction(MdKind.TAMED_EXP, 1024)
    assert rke_output_length(1, Fraction(1, 2), md) == 2
    assert rke_output_length(3, Fraction(1, 2), MdFunction(MdKind.QUADRATIC, 1024)) == 9
    assert rke_output_length(2, Fraction(1, 2), MdFunction(MdKind.TAMED_EXP, 1 << 20)) == 4


def test_md_overrun_is_reported(md):
    def greedy(bits, tape):
        tape.emit('1' * (md(len(bits)) + 1))

    pair = CompressionPair('greedy', greedy, lambda j: '0' * j, TimeBoundFamily.lin(1), md)
    report = verify_pair(pair, BitStringPrefix('1' * 8), 1, 2)
    assert not report.md_ok
    with pytest.raises(MdCapViolation):
        capture_trace(pair, 2)


def test_slow_decompressor_exceeds_its_budget(md):
    def slow(bits, tape):
        tape.tick(10 ** 6)
        tape.emit(bits)

    pair = CompressionPair('slow', slow, lambda j: '1' * j, TimeBoundFamily.lin(1), md)
    with pytest.raises(BudgetExceeded):
        run_decompressor(pair, 3)
    report = verify_pair(pair, BitStringPrefix('1' * 4), 1, 3)
    assert not report.budget_ok


def test_trace_round_trips_through_jsonl(md):
    trace = capture_trace(builtin_identity(SAMPLE, md), 12)
    assert trace.covers(1, 12)
    assert not trace.covers(1, 13)
    restored = Trace.from_jsonl(trace.to_jsonl({'config_hash': 'abc'}))
    assert restored.as_map() == trace.as_map()
    assert restored.md == md


def test_short_sequence_stops_the_trace(md):
    pair = builtin_identity(BitStringPrefix('0101'), md)
    with pytest.raises(PreconditionFailed) as info:
        capture_trace(pair, 6)
    assert info.value.trace.error['j'] == 5
    assert len(info.value.trace.entries) == 4


@pytest.mark.slow
@pytest.mark.parametrize('name', ['identity', 'optimal-even', 'optimal-palindromes', 'rkt', 'rke'])
def test_builtin_pairs_at_full_scale(md, small_table, half_threshold, name):
    if name == 'identity':
        S = native_sequence('rkt', 1024)
        pair = builtin_identity(S, md)
    elif name == 'rkt':
        S = native_sequence('rkt', 1024)
        pair = builtin_rkt(md)
    elif name == 'rke':
        S = native_sequence('rke', 1024, thr=half_threshold, table=small_table)
        pair = builtin_rke(half_threshold, small_table, md)
    else:
        decider = DECIDERS[name.partition('-')[2]]
        S = char_prefix(decider, 1024)
        pair = builtin_optimal(decider, md)
    assert verify_pair(pair, S, 1024, 10).all_ok
    assert not verify_pair(corrupt_decompressor(pair, 7), S, 64, 10).all_ok
