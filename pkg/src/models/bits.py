from dataclasses import dataclass, field
from typing import Callable, Tuple

# Bit strings are plain str objects over the alphabet {'0', '1'}; the empty
# string is λ.
BitString = str

_BIT_CHARS = frozenset('01')


def check_bits(bits: str) -> str:
    """Return `bits` unchanged, or raise ValueError if it is not a bit string."""
    if not isinstance(bits, str) or not _BIT_CHARS.issuperset(bits):
        raise ValueError(f"not a bit string: {bits!r}")
    return bits


def is_prefix(u: str, v: str) -> bool:
    """u ⊑ v"""
    return v.startswith(u)


def compatible(u: str, v: str) -> bool:
    """u ∼ v: one is a prefix of the other."""
    return v.startswith(u) or u.startswith(v)


@dataclass(frozen=True)
class BitStringPrefix:
    """A finite prefix S[1..n] of a binary sequence S.

    Indexing is 1-based to match S[1] being the leftmost bit.
    """

    bits: str
    role: str = 'S'

    def __post_init__(self):
        check_bits(self.bits)

    def __len__(self):
        return len(self.bits)

    def bit(self, n: int) -> str:
        if n < 1 or n > len(self.bits):
            raise IndexError(f"position {n} outside 1..{len(self.bits)}")
        return self.bits[n - 1]

    def upto(self, n: int) -> str:
        """S[1..n] as a bit string (λ when n <= 0)."""
        if n > len(self.bits):
            raise IndexError(f"prefix of length {n} requested from {len(self.bits)} bits")
        return self.bits[:max(n, 0)]

    def covers(self, n: int) -> bool:
        return len(self.bits) >= n

    def to_dict(self):
        return {'role': self.role, 'length': len(self.bits), 'bits': self.bits}


@dataclass(frozen=True)
class LanguageDecider:
    """A total decision procedure for a language L with a per-call step budget.

    `decide` returns (membership bit, steps used). `budget` maps the input
    length to the number of steps one call may take.
    """

    name: str
    decide: Callable[[str], Tuple[int, int]]
    budget: Callable[[int], int] = field(default=lambda n: 4 * (n + 1))


def _all_strings(x):
    return 1, 1


def _no_strings(x):
    return 0, 1


def _even_length(x):
    # Walks the input once to find its parity.
    return (1 if len(x) % 2 == 0 else 0), len(x) + 1


def _palindromes(x):
    return (1 if x == x[::-1] else 0), len(x) // 2 + 1


DECIDERS = {
    'all': LanguageDecider('all', _all_strings),
    'empty': LanguageDecider('empty', _no_strings),
    'even': LanguageDecider('even', _even_length),
    'palindromes': LanguageDecider('palindromes', _palindromes),
}
