import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

EVIDENCE_LABEL = "finite-window"


class DepthNotion(Enum):
    """Which pairing of weak and strong families an experiment instantiates."""

    MONOTONE_POLY = "monotone-poly"
    MONOTONE_LIN = "monotone-lin"
    BASIC_MONOTONE_POLY = "basic-monotone-poly"

    @classmethod
    def for_families(cls, weak_label: str, strong_label: str):
        if strong_label.startswith('Rec'):
            return cls.BASIC_MONOTONE_POLY
        if weak_label.startswith('Lin'):
            return cls.MONOTONE_LIN
        return cls.MONOTONE_POLY


@dataclass(frozen=True)
class DepthParams:
    a: Fraction
    window: Tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, 'a', Fraction(self.a))
        if self.a <= 0:
            raise ValueError(f"margin coefficient must be positive, got {self.a}")
        lo, hi = self.window
        if lo < 1 or hi < lo:
            raise ValueError(f"window {lo}:{hi} is empty or starts below 1")

    @classmethod
    def parse_window(cls, text: str) -> Tuple[int, int]:
        lo, _, hi = text.partition(':')
        return int(lo), int(hi or lo)

    @property
    def indices(self):
        return range(self.window[0], self.window[1] + 1)

    @property
    def size(self):
        return self.window[1] - self.window[0] + 1


@dataclass
class DepthReport:
    """Margins m_j = i_strong - i_weak - ceil(a ilog i_strong) over a window.

    `ae_on_window` and `io_count` are finite-window evidence only.
    """

    weak: str
    strong: str
    params: DepthParams
    margins: List[Tuple[int, int]] = field(default_factory=list)
    weak_family: Optional[str] = None
    strong_family: Optional[str] = None
    notion: Optional[DepthNotion] = None
    # Named side inequalities checked along the way: name -> list of failing j.
    checks: Dict[str, List[int]] = field(default_factory=dict)
    extra: Dict[str, object] = field(default_factory=dict)
    side: Optional[str] = None

    @property
    def ae_on_window(self):
        return all(m >= 0 for _, m in self.margins)

    @property
    def io_count(self):
        return sum(1 for _, m in self.margins if m >= 0)

    @property
    def checks_ok(self):
        return all(not failing for failing in self.checks.values())

    def record_check(self, name, j, holds):
        failing = self.checks.setdefault(name, [])
        if not holds:
            failing.append(j)

    def to_dict(self):
        report = {
            'weak': self.weak,
            'strong': self.strong,
            'a': str(self.params.a),
            'window': list(self.params.window),
            'margins': [[j, m] for j, m in self.margins],
            'ae': self.ae_on_window,
            'io_count': self.io_count,
            'evidence': EVIDENCE_LABEL,
            'weak_family': self.weak_family,
            'strong_family': self.strong_family,
            'notion': self.notion.value if self.notion else None,
            'checks': {name: {'holds': not failing, 'failing_j': failing}
                       for name, failing in sorted(self.checks.items())},
        }
        if self.extra:
            report['extra'] = self.extra
        if self.side:
            report['side'] = self.side
        return report

    def margins_csv(self):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(['j', 'margin'])
        writer.writerows(self.margins)
        return buffer.getvalue()


@dataclass
class ShallowWitness:
    """Outcome of a shallowness check: whether the inequality held on every
    j it applies to, and the j where its premise did not hold."""

    holds: bool
    checked: List[int] = field(default_factory=list)
    premise_failures: List[int] = field(default_factory=list)

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return {'holds': self.holds, 'checked': self.checked, 'premise_failures': self.premise_failures}
