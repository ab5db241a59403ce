import itertools
from fractions import Fraction

import pytest

from src.models.bits import BitStringPrefix
from src.models.reduction import MonotoneReduction
from src.utils.compression import builtin_identity, builtin_rkt, capture_trace, verify_pair
from src.utils.errors import HypothesisUnmet, NoChunkFound, PreconditionFailed
from src.utils.reduction import (REDUCTIONS, get_reduction, invert, pull_back, push_forward,
                                 rkt_slow_growth, slow_growth_b, verify_reduction)

T_SAMPLE = BitStringPrefix('1101000110111010' * 4, 'T')
BIJECTIONS = ['identity', 'prefix-xor', 'block-permutation']


def _strings(max_length):
    for n in range(max_length + 1):
        for bits in itertools.product('01', repeat=n):
            yield ''.join(bits)


def test_library_maps():
    assert REDUCTIONS['prefix-xor']('0110') == '0100'
    assert REDUCTIONS['block-permutation']('1000') == '1110'
    assert REDUCTIONS['sparse-stuffing']('1111') == '1010110'
    with pytest.raises(ValueError):
        get_reduction('reverse')


@pytest.mark.parametrize('name', sorted(REDUCTIONS))
def test_library_reductions_verify(name):
    report = verify_reduction(REDUCTIONS[name], T_SAMPLE)
    assert report.all_ok, report.violations
    assert report.prefixes_checked == len(T_SAMPLE)


def test_truncating_map_is_caught():
    halve = MonotoneReduction('halve', lambda w: w[:len(w) // 2], Fraction(1))
    report = verify_reduction(halve, T_SAMPLE, exhaustive_length=6)
    assert report.monotone_ok
    assert not report.honesty_ok
    assert not report.injective_ok
    assert report.to_dict()['violations'][0]['condition'] == 'honesty'


@pytest.mark.parametrize('name', list(REDUCTIONS))
def test_inversion_recovers_short_inputs(name):
    R = REDUCTIONS[name]
    for x in _strings(8):
        assert invert(R, R(x)).x == x


@pytest.mark.slow
@pytest.mark.parametrize('name', list(REDUCTIONS))
def test_inversion_recovers_inputs_to_length_twelve(name):
    R = REDUCTIONS[name]
    for x in _strings(12):
        assert invert(R, R(x)).x == x


def test_inversion_runs_in_rounds():
    result = invert(REDUCTIONS['identity'], '0' * 64)
    assert result.x == '0' * 64
    assert result.rounds == 9


def test_no_preimage_outside_the_image():
    stuffing = REDUCTIONS['sparse-stuffing']
    with pytest.raises(NoChunkFound) as info:
        invert(stuffing, '1111')
    assert info.value.round_index == 1
    with pytest.raises(NoChunkFound):
        invert(stuffing, '1' * 10)
    assert invert(stuffing, '1' * 10, exact=False).x == ''


@pytest.mark.slow
def test_sparse_stuffing_inverts_exactly_on_its_image():
    stuffing = REDUCTIONS['sparse-stuffing']
    image = {stuffing(x): x for x in _strings(10)}
    outside = 0
    for y in _strings(10):
        if y in image:
            assert invert(stuffing, y).x == image[y]
            continue
        outside += 1
        with pytest.raises(NoChunkFound):
            invert(stuffing, y)
    assert outside > 0


def test_slow_growth_constant():
    assert slow_growth_b(1, 2) == 14
    assert slow_growth_b(Fraction(1, 2), 1) == 7


@pytest.mark.parametrize('name', BIJECTIONS)
def test_pull_back_compresses_the_image(md, name):
    R = REDUCTIONS[name]
    pair = pull_back(R, builtin_identity(T_SAMPLE, md))
    S = BitStringPrefix(R(T_SAMPLE.bits), 'S')
    report = verify_pair(pair, S, 16, 16, calibration=1 << 12)
    assert report.all_ok, report.violations


def test_push_forward_recovers_the_preimage(md):
    R = REDUCTIONS['prefix-xor']
    S = BitStringPrefix(R(T_SAMPLE.bits), 'S')
    pair = push_forward(R, builtin_identity(S, md))
    trace = capture_trace(pair, 16)
    assert trace.covers(1, 16)
    report = verify_pair(pair, T_SAMPLE, 16, 16, calibration=1 << 12)
    assert report.all_ok, report.violations


def test_rkt_slow_growth_through_identity(md):
    report = rkt_slow_growth(REDUCTIONS['identity'], md, 1, (3, 8))
    assert report.b == 8
    assert not report.hypothesis_met
    assert report.hypothesis_failures == [3, 4, 5]
    assert report.target.extra['hypothesis']['error'] == 'HypothesisUnmet'
    assert report.target.ae_on_window
    assert report.target.checks_ok
    assert report.reduction_check.all_ok
    assert report.to_dict()['source']['side'] == 'S'


def test_rkt_slow_growth_strict(md):
    with pytest.raises(HypothesisUnmet):
        rkt_slow_growth(REDUCTIONS['identity'], md, 1, (3, 8), strict=True)
    report = rkt_slow_growth(REDUCTIONS['prefix-xor'], md, 1, (6, 8), strict=True)
    assert report.hypothesis_met
    assert report.target.ae_on_window


def test_rkt_slow_growth_needs_a_long_preimage(md):
    with pytest.raises(PreconditionFailed):
        rkt_slow_growth(REDUCTIONS['sparse-stuffing'], md, 1, (3, 8))


def test_strong_pair_survives_push_forward(md):
    pair = push_forward(REDUCTIONS['identity'], builtin_rkt(md))
    assert pair.family.label == 'Poly(k=3)'
    assert [e.i for e in capture_trace(pair, 5).entries] == [2, 4, 8, 16, 32]


def test_prefix_xor_transfers_rkt_depth(md):
    report = rkt_slow_growth(REDUCTIONS['prefix-xor'], md, 1, (3, 8))
    assert report.target.ae_on_window
    assert report.target.checks['pull_back_loss'] == []
    assert report.target.checks['push_forward_loss'] == []
    assert report.reduction_check.all_ok
