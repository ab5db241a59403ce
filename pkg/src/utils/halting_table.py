"""Step-capped halting table: which programs up to a code-length ceiling halt
within T_max, what they print, and the capped halting probability Ω̂."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from src.models.bits import BitStringPrefix
from src.models.complexity import RandomnessThreshold, ThresholdKind
from src.utils.core import string_index
from src.utils.errors import PreconditionFailed, TableIncomplete
from src.utils.utm import enumerate_programs, run

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HaltingEntry:
    code_length: int
    code: str
    output: str
    steps: int


@dataclass
class HaltingTable:
    ceiling: int
    t_max: int
    halting: List[HaltingEntry] = field(default_factory=list)
    # Steps every enumerated program runs for within T_max, halting or not.
    run_lengths: List[int] = field(default_factory=list)
    omega: Fraction = Fraction(0)
    shortest: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def build(cls, ceiling, t_max):
        table = cls(ceiling, t_max)
        for program in enumerate_programs(ceiling, ceiling):
            outcome = run(program, t_max)
            table.run_lengths.append(outcome.steps)
            if not outcome.halted:
                continue
            entry = HaltingEntry(len(program.code), program.code, outcome.output, outcome.steps)
            table.halting.append(entry)
            table.omega += Fraction(1, 1 << entry.code_length)
            known = table.shortest.get(entry.output)
            if known is None or entry.code_length < known:
                table.shortest[entry.output] = entry.code_length
        # Dovetailing finds programs in order of halting time.
        table.halting.sort(key=lambda e: (e.steps, e.code_length, e.code))
        logger.info("halting table: %d of %d programs up to %d bits halt within %d steps, omega=%s",
                    len(table.halting), len(table.run_lengths), ceiling, t_max, table.omega)
        return table

    def omega_bits(self, n: int) -> str:
        """First n bits of the binary expansion of Ω̂ (zeros past its end)."""
        if n <= 0:
            return ''
        return format(math.floor(self.omega * (1 << n)), f'0{n}b')

    def dovetail(self, mass: Fraction) -> Tuple[Dict[str, int], int]:
        """Run all table programs side by side until the halted mass reaches
        `mass`. Returns the shortest code length per output seen so far and
        the simulated step count."""
        found: Dict[str, int] = {}
        reached = Fraction(0)
        clock = 0
        for entry in self.halting:
            if reached >= mass:
                break
            reached += Fraction(1, 1 << entry.code_length)
            clock = entry.steps
            known = found.get(entry.output)
            if known is None or entry.code_length < known:
                found[entry.output] = entry.code_length
        work = sum(min(length, clock) for length in self.run_lengths)
        return found, work

    def complete_below(self, m: int):
        if m > self.ceiling:
            raise TableIncomplete(f"table ceiling {self.ceiling} below required program length {m}")

    def in_rke(self, x: str, thr: RandomnessThreshold) -> bool:
        if thr.kind is not ThresholdKind.KOLMOGOROV_FRACTION:
            raise PreconditionFailed("membership in R_K,eps needs a Kolmogorov-fraction threshold")
        if thr.t_max != self.t_max:
            raise PreconditionFailed(f"threshold cap {thr.t_max} differs from table cap {self.t_max}")
        threshold = thr.threshold(len(x))
        self.complete_below(threshold - 1)
        known = self.shortest.get(x)
        return known is None or known >= threshold

    def rke_char_prefix(self, n: int, thr: RandomnessThreshold) -> BitStringPrefix:
        bits = ''.join('1' if self.in_rke(string_index(m - 1), thr) else '0' for m in range(1, n + 1))
        return BitStringPrefix(bits, f"R_K,{thr.epsilon}")

    def to_dict(self):
        return {
            'ceiling': self.ceiling,
            't_max': self.t_max,
            'programs': len(self.run_lengths),
            'halting': len(self.halting),
            'omega': str(self.omega),
        }
