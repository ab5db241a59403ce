import itertools
import random
from fractions import Fraction

import pytest

from src.models.complexity import RandomnessThreshold, ThresholdKind
from src.models.compression import TimeBoundFamily
from src.utils.complexity import (count_rkt_members, in_rke, in_rkt, k_capped, k_time_bounded, kt,
                                  kt_oracle, rkt_char_prefix, rkt_sieve_work)
from src.utils.errors import PreconditionFailed, SearchBudgetExceeded
from src.utils.utm import literal_program


def _strings(max_length):
    for n in range(max_length + 1):
        for bits in itertools.product('01', repeat=n):
            yield ''.join(bits)


def test_kt_of_empty_string():
    value = kt('')
    assert value.value == 3
    assert value.program.code == '01'
    assert value.steps == 2


def test_kt_of_one_bit_uses_the_five_bit_literal():
    value = kt('1')
    assert len(value.program.code) == 5
    assert value.value == 5 + 3


@pytest.mark.parametrize('x', list(_strings(2)))
def test_kt_matches_brute_force(x):
    assert kt(x).value == kt_oracle(x).value


@pytest.mark.slow
@pytest.mark.parametrize('x', list(_strings(6)))
def test_kt_matches_brute_force_to_length_six(x):
    assert kt(x).value == kt_oracle(x).value


@pytest.mark.slow
def test_kt_matches_brute_force_on_random_longer_strings():
    rng = random.Random(11)
    for _ in range(100):
        x = ''.join(rng.choice('01') for _ in range(rng.choice((7, 8))))
        assert kt(x).value == kt_oracle(x).value, x


def test_kt_rejects_long_strings_and_tight_search():
    with pytest.raises(PreconditionFailed):
        kt('0' * 11)
    with pytest.raises(SearchBudgetExceeded) as info:
        kt('0110', b_max=4)
    assert info.value.lower_bound == 5


def test_levin_threshold():
    levin = RandomnessThreshold.levin()
    assert [levin.threshold(n) for n in (0, 1, 2, 5, 8)] == [0, 1, 3, 8, 11]


def test_kolmogorov_threshold_validates_epsilon():
    thr = RandomnessThreshold.kolmogorov(Fraction(1, 2), 256)
    assert thr.kind is ThresholdKind.KOLMOGOROV_FRACTION
    assert thr.threshold(7) == 4
    with pytest.raises(ValueError):
        RandomnessThreshold.kolmogorov(Fraction(3, 2))


def test_short_strings_are_kt_random():
    assert in_rkt('')
    assert in_rkt('0')
    assert count_rkt_members(3) == 8


def test_rkt_prefix_at_small_scale():
    prefix = rkt_char_prefix(32)
    assert prefix.role == 'R_Kt'
    # The machine has no program short enough to mark strings this small.
    assert prefix.bits == '1' * 32
    assert rkt_sieve_work(32) > 32
    with pytest.raises(PreconditionFailed):
        rkt_char_prefix(1 << 20, max_index=1 << 16)


def test_k_capped():
    assert k_capped('', 10) == 2
    assert k_capped('1', 100) == 5
    assert k_capped('1', 5) is None
    assert k_capped('1', 0) is None
    assert k_time_bounded('1', TimeBoundFamily.lin(10)) == 5
    with pytest.raises(PreconditionFailed):
        k_time_bounded('1', TimeBoundFamily.rec())


def test_k_capped_never_exceeds_the_literal():
    for x in _strings(3):
        assert k_capped(x, 1 << 10) <= len(literal_program(x).code)


def test_in_rke(half_threshold):
    assert in_rke('', half_threshold)
    assert in_rke('10', half_threshold)
    with pytest.raises(PreconditionFailed):
        in_rke('10', RandomnessThreshold.levin())


def test_every_length_has_a_kt_random_string():
    for n in range(9):
        assert count_rkt_members(n) >= 1


@pytest.mark.slow
def test_sieve_agrees_with_membership():
    from src.utils.core import string_index

    bits = rkt_char_prefix(1024).bits
    mismatches = [m for m in range(1, 1025) if (bits[m - 1] == '1') != in_rkt(string_index(m - 1))]
    assert mismatches == []
