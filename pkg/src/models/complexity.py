import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from src.models.program import MACHINE, Program
from src.utils.core import ilog


class ThresholdKind(Enum):
    LEVIN = "levin"
    KOLMOGOROV_FRACTION = "kolmogorov-fraction"


@dataclass(frozen=True)
class RandomnessThreshold:
    """Randomness cut-off for strings of a given length."""

    kind: ThresholdKind
    epsilon: Optional[Fraction] = None
    t_max: Optional[int] = None

    def __post_init__(self):
        if self.kind is ThresholdKind.KOLMOGOROV_FRACTION:
            if self.epsilon is None or not 0 < self.epsilon < 1:
                raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
            if not self.t_max or self.t_max < 1:
                raise ValueError("a Kolmogorov threshold needs a positive step cap")
            object.__setattr__(self, 'epsilon', Fraction(self.epsilon))

    @classmethod
    def levin(cls):
        return cls(ThresholdKind.LEVIN)

    @classmethod
    def kolmogorov(cls, epsilon, t_max=1 << 16):
        return cls(ThresholdKind.KOLMOGOROV_FRACTION, Fraction(epsilon), t_max)

    def threshold(self, n: int) -> int:
        if self.kind is ThresholdKind.LEVIN:
            return 0 if n == 0 else n + ilog(n)
        return math.ceil(self.epsilon * n)

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'epsilon': str(self.epsilon) if self.epsilon is not None else None,
            't_max': self.t_max,
        }


@dataclass(frozen=True)
class KtValue:
    value: int
    program: Optional[Program] = None
    steps: Optional[int] = None

    def to_dict(self, x: str = None):
        record = {
            'value': self.value,
            'witness_code': self.program.code if self.program else None,
            'witness_steps': self.steps,
            'machine_variant': MACHINE.variant,
        }
        if x is not None:
            record = {'x': x, **record}
        return record
