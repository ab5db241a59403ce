"""Shared string machinery: integer log, prefix-free codes, the standard
enumeration of strings, characteristic sequences and the .dseq file format."""
import logging
import struct
from fractions import Fraction
from pathlib import Path

from src.models.bits import BitStringPrefix, LanguageDecider, check_bits
from src.utils.errors import BudgetExceeded, MalformedEncoding

logger = logging.getLogger(__name__)

DSEQ_MAGIC = b'DSEQ'
DSEQ_VERSION = 1
_DSEQ_HEADER = struct.Struct('<4sBQ')


def ilog(n: int) -> int:
    """⌈log₂ n⌉ for n >= 2, and 0 for n in {0, 1}."""
    if n <= 1:
        return 0
    return (n - 1).bit_length()


def floor_log2(value) -> int:
    """⌊log₂ value⌋ for a positive integer or Fraction."""
    value = Fraction(value)
    if value <= 0:
        raise ValueError(f"log of non-positive value {value}")
    num, den = value.numerator, value.denominator
    k = num.bit_length() - den.bit_length()
    if k >= 0:
        if num < (den << k):
            k -= 1
    elif (num << -k) < den:
        k -= 1
    return k


def prefix_encode(x: str) -> str:
    """dbl(x) followed by the separator 01."""
    check_bits(x)
    return ''.join(b + b for b in x) + '01'


def read_prefix_field(y: str, pos: int = 0):
    """Decode one self-delimited field of `y` starting at `pos`.

    Returns (payload, end position). On failure raises MalformedEncoding
    whose `consumed` attribute counts the bits read before the failure.
    """
    payload = []
    i = pos
    while i + 1 < len(y):
        pair = y[i:i + 2]
        i += 2
        if pair == '01':
            return ''.join(payload), i
        if pair == '10':
            err = MalformedEncoding(f"undoubled pair at offset {i - 2}")
            err.consumed = i - pos
            raise err
        payload.append(pair[0])
    err = MalformedEncoding("no 01 separator before end of input")
    err.consumed = len(y) - pos
    raise err


def prefix_decode(y: str):
    """Inverse of prefix_encode: returns (payload, remainder)."""
    check_bits(y)
    payload, end = read_prefix_field(y, 0)
    return payload, y[end:]


def string_index(n: int) -> str:
    """s_n in the length-increasing lexicographic enumeration λ, 0, 1, 00, ..."""
    if n < 0:
        raise ValueError(f"negative index {n}")
    length = (n + 1).bit_length() - 1
    if length == 0:
        return ''
    return format(n + 1 - (1 << length), f'0{length}b')


def index_of_string(x: str) -> int:
    check_bits(x)
    return (1 << len(x)) - 1 + (int(x, 2) if x else 0)


def encode_int(value: int) -> str:
    """Self-delimited integer: prefix_encode(s_value)."""
    return prefix_encode(string_index(value))


def read_int(y: str, pos: int = 0):
    payload, end = read_prefix_field(y, pos)
    return index_of_string(payload), end


def char_prefix(decider: LanguageDecider, n: int, role: str = None) -> BitStringPrefix:
    """χ_L[1..n]; bit m is decide(s_{m-1})."""
    if n < 1:
        raise ValueError("characteristic prefix length must be positive")
    bits = []
    for m in range(1, n + 1):
        x = string_index(m - 1)
        bit, steps = decider.decide(x)
        budget = decider.budget(len(x))
        if steps > budget:
            raise BudgetExceeded(
                f"decider {decider.name} used {steps} steps on {x!r}, budget {budget}",
                steps=steps, budget=budget)
        bits.append('1' if bit else '0')
    return BitStringPrefix(''.join(bits), role or f"chi_{decider.name}")


def pack_bits(bits: str) -> bytes:
    """Pack bits MSB-first, zero-padding the final byte."""
    check_bits(bits)
    padded = bits + '0' * (-len(bits) % 8)
    return bytes(int(padded[i:i + 8], 2) for i in range(0, len(padded), 8))


def unpack_bits(data: bytes, count: int) -> str:
    if len(data) * 8 < count:
        raise MalformedEncoding(f"{len(data)} bytes cannot hold {count} bits")
    return ''.join(format(byte, '08b') for byte in data)[:count]


def write_dseq(path, prefix: BitStringPrefix) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _DSEQ_HEADER.pack(DSEQ_MAGIC, DSEQ_VERSION, len(prefix.bits))
    path.write_bytes(header + pack_bits(prefix.bits))
    logger.info("wrote %d bits to %s", len(prefix.bits), path)
    return path


def read_dseq(path, role: str = 'S') -> BitStringPrefix:
    data = Path(path).read_bytes()
    if len(data) < _DSEQ_HEADER.size:
        raise MalformedEncoding(f"{path}: truncated header")
    magic, version, count = _DSEQ_HEADER.unpack_from(data)
    if magic != DSEQ_MAGIC:
        raise MalformedEncoding(f"{path}: bad magic {magic!r}")
    if version != DSEQ_VERSION:
        raise MalformedEncoding(f"{path}: unsupported version {version}")
    body = data[_DSEQ_HEADER.size:]
    if len(body) != (count + 7) // 8:
        raise MalformedEncoding(f"{path}: expected {(count + 7) // 8} payload bytes, got {len(body)}")
    return BitStringPrefix(unpack_bits(body, count), role)


def parse_bit_literal(text: str) -> str:
    """Parse a command-line bit string: 0b-prefixed binary, 0x-prefixed hex,
    or bare binary. `0b` alone is λ."""
    text = text.strip()
    if text.startswith('0b'):
        return check_bits(text[2:])
    if text.startswith('0x'):
        digits = text[2:]
        try:
            return ''.join(format(int(d, 16), '04b') for d in digits)
        except ValueError:
            raise MalformedEncoding(f"not a hex literal: {text!r}")
    try:
        return check_bits(text)
    except ValueError:
        raise MalformedEncoding(f"not a bit literal: {text!r}")
