from fractions import Fraction

import pytest

from src.models.bits import DECIDERS, BitStringPrefix, compatible, is_prefix
from src.utils.core import (char_prefix, encode_int, floor_log2, ilog, index_of_string,
                            pack_bits, parse_bit_literal, prefix_decode, prefix_encode, read_dseq,
                            read_int, read_prefix_field, string_index, write_dseq)
from src.utils.errors import BudgetExceeded, MalformedEncoding


@pytest.mark.parametrize('n, expected', [(0, 0), (1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (1024, 10), (1025, 11)])
def test_ilog_is_ceiling_log(n, expected):
    assert ilog(n) == expected


def test_floor_log2_handles_fractions():
    assert floor_log2(1) == 0
    assert floor_log2(7) == 2
    assert floor_log2(8) == 3
    assert floor_log2(Fraction(1, 8)) == -3
    assert floor_log2(Fraction(3, 16)) == -3
    with pytest.raises(ValueError):
        floor_log2(0)


def test_string_enumeration_order():
    assert [string_index(n) for n in range(7)] == ['', '0', '1', '00', '01', '10', '11']
    for n in range(300):
        assert index_of_string(string_index(n)) == n


def test_prefix_code_examples():
    assert prefix_encode('') == '01'
    assert prefix_encode('10') == '110001'
    assert prefix_decode('110001' + '111') == ('10', '111')
    assert encode_int(0) == '01'
    assert encode_int(4) == '001101'
    assert read_int('001101' + '0', 0) == (4, 6)


def test_prefix_code_is_prefix_free():
    codes = [prefix_encode(string_index(n)) for n in range(200)]
    for a in codes:
        for b in codes:
            if a != b:
                assert not b.startswith(a)


@pytest.mark.slow
def test_string_index_is_a_bijection_below_2_to_the_16():
    seen = set()
    for n in range(1 << 16):
        x = string_index(n)
        assert index_of_string(x) == n
        assert len(x) == (n + 1).bit_length() - 1
        seen.add(x)
    assert len(seen) == 1 << 16


@pytest.mark.slow
def test_prefix_decode_inverts_prefix_encode_to_length_16():
    for length in range(17):
        for value in range(1 << length):
            x = format(value, f'0{length}b') if length else ''
            assert prefix_decode(prefix_encode(x)) == (x, '')
            assert prefix_decode(prefix_encode(x) + '10') == (x, '10')


def test_malformed_prefix_field_reports_consumed_bits():
    with pytest.raises(MalformedEncoding) as info:
        read_prefix_field('0010', 0)
    assert info.value.consumed == 4
    with pytest.raises(MalformedEncoding):
        prefix_decode('000')


def test_bit_relations():
    assert is_prefix('', '01')
    assert is_prefix('01', '011')
    assert not is_prefix('011', '01')
    assert compatible('011', '01')
    assert not compatible('00', '01')


def test_bitstring_prefix_is_one_based():
    s = BitStringPrefix('0110')
    assert s.bit(1) == '0'
    assert s.bit(2) == '1'
    assert s.upto(3) == '011'
    assert s.upto(0) == ''
    with pytest.raises(IndexError):
        s.bit(5)
    with pytest.raises(ValueError):
        BitStringPrefix('012')


def test_char_prefix_of_even_length_strings():
    # λ, 0, 1, 00, 01, 10, 11
    assert char_prefix(DECIDERS['even'], 7).bits == '1001111'


def test_char_prefix_enforces_decider_budget():
    from src.models.bits import LanguageDecider

    greedy = LanguageDecider('greedy', lambda x: (1, 100), budget=lambda n: 10)
    with pytest.raises(BudgetExceeded):
        char_prefix(greedy, 3)


def test_dseq_file_round_trip(tmp_path):
    prefix = BitStringPrefix('1011001110', 'demo')
    path = write_dseq(tmp_path / 'demo.dseq', prefix)
    data = path.read_bytes()
    assert data[:4] == b'DSEQ'
    assert data[13:] == pack_bits('1011001110') == bytes([0b10110011, 0b10000000])
    assert read_dseq(path, 'demo') == prefix


def test_dseq_rejects_bad_files(tmp_path):
    bad_magic = tmp_path / 'bad.dseq'
    bad_magic.write_bytes(b'XSEQ' + bytes(9))
    with pytest.raises(MalformedEncoding):
        read_dseq(bad_magic)
    truncated = tmp_path / 'short.dseq'
    write_dseq(truncated, BitStringPrefix('1' * 20))
    truncated.write_bytes(truncated.read_bytes()[:-1])
    with pytest.raises(MalformedEncoding):
        read_dseq(truncated)


def test_parse_bit_literal_forms():
    assert parse_bit_literal('0b') == ''
    assert parse_bit_literal('0b0101') == '0101'
    assert parse_bit_literal('0xa') == '1010'
    assert parse_bit_literal('110') == '110'
    with pytest.raises(MalformedEncoding):
        parse_bit_literal('zz')
