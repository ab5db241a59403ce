from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Optional, Tuple


class RunKind(Enum):
    HALTED = "halted"
    EXHAUSTED = "exhausted"
    INVALID = "invalid"


class Opcode(IntEnum):
    EMIT0 = 0b000
    EMIT1 = 0b001
    INC = 0b010
    DEC = 0b011
    LDI = 0b100
    JZ = 0b101
    SWAP = 0b110
    HALT = 0b111


# Registers saturate inside [0, REGISTER_MAX].
REGISTER_MAX = 255
OPCODE_WIDTH = 3


@dataclass(frozen=True)
class MachineConfig:
    variant: str = 'acc-ctr-3bit'
    opcode_version: int = 1

    def to_dict(self):
        return {'variant': self.variant, 'opcode_version': self.opcode_version}


MACHINE = MachineConfig()


@dataclass(frozen=True)
class Program:
    """A decoded program: header-delimited code plus its static instruction list.

    `instructions` holds (opcode, argument) pairs; the argument is the
    immediate value for LDI, the absolute jump target for JZ and None
    otherwise. `tail` is the literal bit run flushed when the machine halts.
    """

    code: str
    body_length: int
    instructions: Tuple[Tuple[Opcode, Optional[int]], ...]
    tail: str

    def __len__(self):
        return len(self.code)

    def disassemble(self):
        lines = []
        for index, (op, arg) in enumerate(self.instructions):
            if op is Opcode.LDI:
                lines.append(f"{index}: LDI {arg}")
            elif op is Opcode.JZ:
                lines.append(f"{index}: JZ ->{arg}")
            else:
                lines.append(f"{index}: {op.name}")
        if self.tail:
            lines.append(f"tail: {self.tail}")
        return lines

    def to_dict(self):
        return {
            'code': self.code,
            'length': len(self.code),
            'body_length': self.body_length,
            'listing': self.disassemble(),
        }


@dataclass(frozen=True)
class RunOutcome:
    kind: RunKind
    output: str
    steps: int

    def __post_init__(self):
        if len(self.output) > self.steps:
            raise ValueError(f"{len(self.output)} output bits in {self.steps} steps")

    @property
    def halted(self):
        return self.kind is RunKind.HALTED

    def to_dict(self):
        return {'kind': self.kind.value, 'output': self.output, 'steps': self.steps}
