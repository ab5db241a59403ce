from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional

from src.models.compression import TimeBoundFamily
from src.models.depth import DepthReport


@dataclass(frozen=True)
class MonotoneReduction:
    """A map M on bit strings that is monotone, honest within h*ilog(n) of
    the input length, and monotone-injective.

    `apply` must run in time linear in its input; families above Lin are
    declared for composed pairs.
    """

    name: str
    apply: Callable[[str], str]
    h: Fraction
    family: TimeBoundFamily = field(default_factory=lambda: TimeBoundFamily.lin(1))
    surjective: bool = True

    def __call__(self, w: str) -> str:
        return self.apply(w)

    def to_dict(self):
        return {'name': self.name, 'h': str(self.h), 'family': self.family.label}


@dataclass
class ReductionReport:
    reduction: str
    monotone_ok: bool = True
    honesty_ok: bool = True
    injective_ok: bool = True
    prefixes_checked: int = 0
    pairs_checked: int = 0
    violations: List[dict] = field(default_factory=list)

    @property
    def all_ok(self):
        return self.monotone_ok and self.honesty_ok and self.injective_ok

    def fail(self, condition, detail):
        setattr(self, f"{condition}_ok", False)
        self.violations.append({'condition': condition, 'detail': detail})

    def to_dict(self):
        return {
            'reduction': self.reduction,
            'monotone_ok': self.monotone_ok,
            'honesty_ok': self.honesty_ok,
            'injective_ok': self.injective_ok,
            'prefixes_checked': self.prefixes_checked,
            'pairs_checked': self.pairs_checked,
            'violations': self.violations,
        }


@dataclass(frozen=True)
class InversionResult:
    x: str
    rounds: int
    tests: int

    def to_dict(self):
        return {'x': self.x, 'rounds': self.rounds, 'tests': self.tests}


@dataclass
class SlowGrowthReport:
    """Source (S = M(T)) and target (T) side depth reports of one
    slow-growth run, plus the constant b the source side was held to."""

    reduction: MonotoneReduction
    b: Fraction
    source: DepthReport
    target: DepthReport
    hypothesis_met: bool = True
    hypothesis_failures: List[int] = field(default_factory=list)
    reduction_check: Optional[ReductionReport] = None

    def to_dict(self):
        return {
            'reduction': self.reduction.to_dict(),
            'b': str(self.b),
            'hypothesis_met': self.hypothesis_met,
            'hypothesis_failures': self.hypothesis_failures,
            'source': self.source.to_dict(),
            'target': self.target.to_dict(),
            'reduction_check': self.reduction_check.to_dict() if self.reduction_check else None,
        }
