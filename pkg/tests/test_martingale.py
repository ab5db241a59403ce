import random
from fractions import Fraction

import pytest

from src.models.bits import DECIDERS, BitStringPrefix
from src.models.compression import Trace, TraceEntry
from src.models.martingale import Martingale, dyadic_parts
from src.utils.compression import builtin_optimal, capture_trace, verify_pair
from src.utils.core import char_prefix
from src.utils.errors import NonDyadicValue, PreconditionFailed, ScheduleMismatch
from src.utils.martingale import (ArithmeticCoder, bettor_library, bettor_martingale,
                                  check_compressor_to_martingale, check_martingale_to_compressor,
                                  code_checkpoints, compressor_to_martingale, constant_martingale, designated_checks,
                                  diagonal_schedule, diagonal_sequence, fairness_check,
                                  fairness_violation, martingale_to_compressor, mixture_martingale,
                                  padded_program_stream, savings_martingale, table_martingale, universal,
                                  universal_eval, universal_martingale)


def _bettor(name, k=2):
    return next(b for b in bettor_library(k) if b.name == name)


class TestLibrary:

    def test_library_grows_by_prefix(self):
        small, large = bettor_library(2), bettor_library(3)
        assert [b.name for b in large[:len(small)]] == [b.name for b in small]
        assert len(bettor_library(1)) == 9
        assert [b.name for b in small[9:]] == ['repeat-2', 'flip-2', 'context-2']
        with pytest.raises(PreconditionFailed):
            bettor_library(0)

    @pytest.mark.parametrize('bettor', bettor_library(3), ids=lambda b: b.name)
    def test_bettors_are_fair(self, bettor):
        assert fairness_check(bettor_martingale(bettor), 10)

    def test_all_on_zero_doubles_on_zeros(self):
        d = bettor_martingale(_bettor('all-on-0'))
        assert d('0000') == 16
        assert d('0010') == 0

    def test_unfair_table_is_located(self):
        d = table_martingale('lopsided', {'': Fraction(1), '0': Fraction(2), '1': Fraction(1)})
        assert fairness_violation(d, 1) == ''
        assert fairness_check(constant_martingale(), 8)

    def test_table_export_is_dyadic(self):
        rows = bettor_martingale(_bettor('same-3/4')).to_table(2)
        assert len(rows) == 7
        assert rows[0] == {'w': '', 'length': 0, 'numerator': 1, 'exponent': 0}
        with pytest.raises(NonDyadicValue):
            dyadic_parts(Fraction(1, 3))
        third = Martingale('third', lambda w: Fraction(1, 3))
        with pytest.raises(NonDyadicValue):
            third.to_dict()


class TestUniversal:

    def test_weights_follow_enumeration_order(self):
        assert universal_eval(1, 2, '') == Fraction(3, 4)
        assert universal_eval(1, 2, '0') == Fraction(1)
        assert universal(2, 12).weights[-1] == Fraction(1, 1 << 12)
        with pytest.raises(PreconditionFailed):
            universal(1, 10)

    def test_universal_martingale_is_fair(self):
        d = universal_martingale(2, 12)
        assert d.family.k == 2
        assert fairness_check(d, 8)

    def test_mixture_is_fair(self):
        bettors = [_bettor('flip-3/4'), _bettor('context-2')]
        d = mixture_martingale('mix', bettors, [Fraction(1, 2), Fraction(1, 4)])
        assert d('') == Fraction(3, 4)
        assert fairness_check(d, 8)


class TestArithmeticCoder:

    def test_fair_coin_codes_strings_as_themselves(self):
        coder = ArithmeticCoder(constant_martingale())
        assert coder.encode('101') == '101'
        assert coder.decode('101', 3) == '101'
        assert coder.interval('10') == (Fraction(1, 2), Fraction(3, 4))

    def test_winning_bettor_needs_no_bits(self):
        coder = ArithmeticCoder(bettor_martingale(_bettor('all-on-0')))
        assert coder.encode('00000') == ''
        assert coder.decode('', 5) == '00000'

    def test_zero_measure_is_rejected(self):
        coder = ArithmeticCoder(bettor_martingale(_bettor('all-on-0')))
        with pytest.raises(PreconditionFailed):
            coder.encode('01')


class TestConversions:

    def test_martingale_to_compressor(self, md):
        d = bettor_martingale(_bettor('same-7/8'))
        w = BitStringPrefix('0' * 32, 'zeros')
        pair = martingale_to_compressor(d, md, w)
        # μ(0^32) = (7/8)^31 / 2 lies just above 2^-7.
        assert pair.coder.encode(w.bits) == '0' * 7
        assert verify_pair(pair, w, 32, 12).all_ok
        trace = capture_trace(pair, 12)
        assert trace.i_at(7) == 32
        report = check_martingale_to_compressor(d, trace, w)
        assert report.holds
        assert [(j, i) for j, i, _ in report.checkpoints] == [
            (1, 1), (2, 4), (3, 8), (4, 16), (5, 21), (6, 26), (7, 32)]
        assert (7, 32, 25) in report.checkpoints
        assert report.tightest == 0
        assert report.short == [] and report.uncovered == []
        assert report.skipped == []

    def test_checkpoints_come_from_the_code_not_the_trace(self, md):
        d = bettor_martingale(_bettor('all-on-0'))
        w = BitStringPrefix('0' * 64, 'zeros')
        pair = martingale_to_compressor(d, md, w)
        assert code_checkpoints(pair.coder, pair.program, w, md) == [(1, 2)]
        honest = check_martingale_to_compressor(d, capture_trace(pair, 8), w)
        assert honest.holds
        assert honest.checkpoints == [(1, 2, 2)]
        stalled = Trace(pair.name, 'zeros', md, 'poly2', 16,
                        [TraceEntry(j, 1, 1) for j in range(1, 65)])
        report = check_martingale_to_compressor(d, stalled, w)
        assert not report.holds
        assert report.short == [(1, 2, 1)]

    def test_missing_checkpoint_fails(self, md):
        d = bettor_martingale(_bettor('same-7/8'))
        w = BitStringPrefix('0' * 32, 'zeros')
        pair = martingale_to_compressor(d, md, w)
        trace = capture_trace(pair, 5)
        report = check_martingale_to_compressor(d, trace, w)
        assert not report.holds
        assert report.uncovered == [6, 7]

    def test_savings_martingale_keeps_locked_gains(self):
        d = savings_martingale(bettor_martingale(_bettor('all-on-0')))
        assert d('') == 1
        for n in range(1, 9):
            assert d('0' * n) == n + 1
        assert d('0' * 5 + '1') == 5
        assert d('1') == 0
        assert fairness_check(d, 10)

    def test_savings_coding_still_delivers(self, md):
        d = bettor_martingale(_bettor('same-7/8'))
        w = BitStringPrefix('0' * 32, 'zeros')
        pair = martingale_to_compressor(d, md, w, savings=True)
        assert pair.martingale.name == 'savings[same-7/8]'
        core = pair.coder.encode(w.bits)
        assert len(core) > 7
        trace = capture_trace(pair, len(core))
        assert trace.i_at(len(core)) == 32
        report = check_martingale_to_compressor(pair.martingale, trace, w)
        assert report.holds, (report.short, report.failures)

    def test_compressor_to_martingale(self, md):
        S = char_prefix(DECIDERS['even'], 64)
        pair = builtin_optimal(DECIDERS['even'], md)
        d = compressor_to_martingale(pair, horizon=8)
        for n in range(17):
            assert d(S.upto(n)) == 1 << n
        assert fairness_check(d, 5)
        trace = capture_trace(pair, 4)
        report = check_compressor_to_martingale(d, trace, S)
        assert report.holds
        assert report.tightest == -1

    def test_flat_martingale_does_not_explain_a_compressor(self, md):
        S = char_prefix(DECIDERS['even'], 64)
        trace = capture_trace(builtin_optimal(DECIDERS['even'], md), 4)
        report = check_compressor_to_martingale(constant_martingale(), trace, S)
        assert not report.holds
        assert report.failures[-1] == (4, 16, 0)
        assert report.to_dict()['tightest_constant'] == 12


class TestDiagonal:

    def test_schedule_blocks(self, md):
        schedule = diagonal_schedule(4096, md)
        assert [(b.k, b.l, b.length) for b in schedule.blocks] == \
            [(1, 1, 1), (1, 2, 4), (2, 2, 1024), (1, 3, 1029), (2, 3, 2038)]
        assert schedule.blocks[-1].full_length == 2058
        assert schedule.total_length == 4096

    def test_every_block_loses_for_its_martingale(self, md):
        result = diagonal_sequence(64, md)
        assert len(result.prefix) == 64
        assert result.nonincreasing
        for k, _, start, end in result.block_values:
            assert end <= start
        assert result.to_dict()['blocks'][1]['start'] == 2

    def test_padded_stream_replays_the_sequence(self, md):
        result = diagonal_sequence(2058, md)
        stream = padded_program_stream(result.prefix, result.schedule, 1, md)
        assert len(stream.bits) == 1029
        assert stream.checkpoints == {(1, 1): 1, (1, 2): 2, (1, 3): 1029}
        trace = capture_trace(stream.pair, 1029)
        checks = designated_checks(stream, result.schedule, trace)
        assert [(c.l, c.j, c.i) for c in checks] == [(2, 2, 4), (3, 1029, 1029)]
        assert all(check.ok for check in checks)
        tape_output = verify_pair(stream.pair, result.prefix, 1, 1029)
        assert tape_output.decompression_ok and tape_output.monotone_ok

    def test_schedule_must_match_the_sequence(self, md):
        result = diagonal_sequence(64, md)
        with pytest.raises(ScheduleMismatch):
            padded_program_stream(BitStringPrefix(result.prefix.bits[:-1]), result.schedule, 1, md)
        with pytest.raises(ScheduleMismatch):
            padded_program_stream(result.prefix, result.schedule, 3, md)

    @pytest.mark.slow
    def test_full_diagonal_checkpoints(self, md):
        result = diagonal_sequence(4096, md)
        assert result.nonincreasing
        stream = padded_program_stream(result.prefix, result.schedule, 1, md)
        trace = capture_trace(stream.pair, max(stream.checkpoints.values()))
        checks = designated_checks(stream, result.schedule, trace)
        assert [(c.k, c.l) for c in checks] == [(1, 2), (1, 3)]
        assert all(check.ok for check in checks)
        replay = verify_pair(stream.pair, result.prefix, 1, len(stream.bits))
        assert replay.decompression_ok and replay.monotone_ok


@pytest.mark.slow
class TestAcceptanceSweeps:

    def test_every_constructed_martingale_is_fair_to_depth_twelve(self, md):
        martingales = [bettor_martingale(b) for b in bettor_library(3)]
        martingales.append(universal_martingale(3, len(bettor_library(3))))
        optimal = builtin_optimal(DECIDERS['palindromes'], md)
        martingales.append(compressor_to_martingale(optimal, horizon=6))
        martingales.append(savings_martingale(universal_martingale(2, 12)))
        for d in martingales:
            assert fairness_violation(d, 12) is None, d.name

    def test_martingale_to_compressor_on_random_sequences(self, md):
        rng = random.Random(7)
        bettors = [bettor_martingale(_bettor(name)) for name in ('same-3/4', 'flip-7/8', 'context-2')]
        bettors.append(universal_martingale(2, 12))
        for _ in range(100):
            w = BitStringPrefix(''.join(rng.choice('01') for _ in range(64)), 'w')
            for d in bettors:
                pair = martingale_to_compressor(d, md, w)
                trace = capture_trace(pair, max(8, len(pair.coder.encode(w.bits))))
                report = check_martingale_to_compressor(d, trace, w)
                assert report.holds, (d.name, w.bits, report.failures)
                assert trace.entries[-1].i == 64
                locked = martingale_to_compressor(d, md, w, savings=True)
                trace = capture_trace(locked, max(8, len(locked.coder.encode(w.bits))))
                report = check_martingale_to_compressor(locked.martingale, trace, w)
                assert report.holds, (locked.name, w.bits, report.short, report.failures)

    def test_compressor_to_martingale_on_builtin_pairs(self, md, small_table, half_threshold):
        from src.utils.compression import builtin_identity, builtin_rke, builtin_rkt, native_sequence

        rkt_bits = native_sequence('rkt', 64)
        cases = [
            (builtin_identity(rkt_bits, md), rkt_bits),
            (builtin_optimal(DECIDERS['even'], md), char_prefix(DECIDERS['even'], 64)),
            (builtin_rkt(md), rkt_bits),
            (builtin_rke(half_threshold, small_table, md),
             native_sequence('rke', 64, thr=half_threshold, table=small_table)),
        ]
        for pair, S in cases:
            d = compressor_to_martingale(pair, horizon=6)
            report = check_compressor_to_martingale(d, capture_trace(pair, 6), S)
            assert report.holds, (pair.name, report.failures)
