"""The reference machine U: decoding, step-counted execution and program
enumeration.

A program is prefix_encode(s_B) followed by a body of exactly B bits. The
body is a stream of 3-bit opcodes; LDI and JZ read one self-delimited
integer operand each. Parsing stops at the first HALT or when fewer than
three body bits remain, and whatever is left becomes the literal tail that
the machine prints, one bit per step, when it halts.

Step accounting: one step per code bit for decoding (charged before the
first dispatch), one step per dispatch and one more per emitted bit.
"""
import itertools
import logging
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from src.models.bits import check_bits
from src.models.program import (OPCODE_WIDTH, REGISTER_MAX, Opcode, Program,
                                RunKind, RunOutcome)
from src.utils.core import encode_int, ilog, read_int
from src.utils.errors import InvalidProgram, MalformedEncoding, PreconditionFailed

logger = logging.getLogger(__name__)

# Literal programs: |code| <= |x| + 2*ilog(|x|) + LITERAL_LENGTH_SLACK and
# they halt within LITERAL_STEP_FACTOR * (|x| + 1) steps.
LITERAL_LENGTH_SLACK = 9
LITERAL_STEP_FACTOR = 10

DEFAULT_ENUMERATION_CEILING = 28

ProgramLike = Union[Program, str]


def zigzag_encode(offset: int) -> int:
    return 2 * offset if offset >= 0 else -2 * offset - 1


def zigzag_decode(value: int) -> int:
    return value // 2 if value % 2 == 0 else -(value + 1) // 2


def _invalid(message, consumed):
    err = InvalidProgram(message)
    err.consumed = consumed
    return err


def _parse_body(body: str):
    """Static parse of a body into (opcode, raw operand) pairs plus the tail."""
    instructions = []
    pos = 0
    while len(body) - pos >= OPCODE_WIDTH:
        op = Opcode(int(body[pos:pos + OPCODE_WIDTH], 2))
        pos += OPCODE_WIDTH
        if op is Opcode.HALT:
            instructions.append((op, None))
            break
        if op in (Opcode.LDI, Opcode.JZ):
            try:
                value, pos = read_int(body, pos)
            except MalformedEncoding as err:
                err.consumed += pos
                raise
            instructions.append((op, value))
        else:
            instructions.append((op, None))
    return instructions, body[pos:]


@lru_cache(maxsize=1 << 16)
def decode(code: str) -> Program:
    """Decode `code` into a Program or raise InvalidProgram.

    The raised error carries `consumed`, the number of code bits read before
    the verdict; invalid runs are charged exactly that many steps.
    """
    check_bits(code)
    try:
        body_length, header_end = read_int(code, 0)
    except MalformedEncoding as err:
        raise _invalid(f"bad length header: {err}", err.consumed)

    end = header_end + body_length
    if len(code) < end:
        raise _invalid(f"header announces {body_length} body bits, "
                       f"{len(code) - header_end} present", len(code))
    if len(code) > end:
        raise _invalid(f"{len(code) - end} trailing bits after the body", end)

    try:
        parsed, tail = _parse_body(code[header_end:])
    except MalformedEncoding as err:
        raise _invalid(f"bad operand: {err}", header_end + err.consumed)

    count = len(parsed)
    instructions = []
    for index, (op, value) in enumerate(parsed):
        if op is Opcode.LDI:
            value = min(value, REGISTER_MAX)
        elif op is Opcode.JZ:
            value = index + 1 + zigzag_decode(value)
            if value < 0 or value > count:
                raise _invalid(f"jump at {index} lands outside 0..{count}", end)
        instructions.append((op, value))
    return Program(code, body_length, tuple(instructions), tail)


def assemble(instructions: Sequence[Tuple[Opcode, Optional[int]]], tail: str = '') -> Program:
    """Build a program from (opcode, operand) pairs; JZ operands are relative
    offsets in instruction units."""
    check_bits(tail)
    parts = []
    for op, arg in instructions:
        parts.append(format(int(op), '03b'))
        if op is Opcode.LDI:
            parts.append(encode_int(arg))
        elif op is Opcode.JZ:
            parts.append(encode_int(zigzag_encode(arg)))
    body = ''.join(parts) + tail
    return decode(encode_int(len(body)) + body)


def literal_program(x: str) -> Program:
    """HALT followed by x as the literal tail."""
    body = format(int(Opcode.HALT), '03b') + check_bits(x)
    return decode(encode_int(len(body)) + body)


def literal_step_bound(n: int) -> int:
    return LITERAL_STEP_FACTOR * (n + 1)


def kt_literal_bound(x: str) -> int:
    """Kt upper bound given by the literal witness."""
    return len(literal_program(x).code) + ilog(literal_step_bound(len(x)))


def _execute(program: Program, budget: int, target: Optional[str]):
    """Interpreter core.

    With a target, returns None as soon as the run can no longer halt with
    output exactly `target` (wrong bit, too many bits, endless loop, or a
    halt with a short output). Budget exhaustion still yields an Exhausted
    outcome, since a larger budget might succeed.
    """
    steps = len(program.code)
    if budget < steps:
        return RunOutcome(RunKind.EXHAUSTED, '', budget)

    instructions = program.instructions
    count = len(instructions)
    limit = len(target) if target is not None else -1
    pc = acc = ctr = 0
    out: List[str] = []
    emitted_at: List[int] = []
    seen = {}

    def exhausted():
        return RunOutcome(RunKind.EXHAUSTED, ''.join(out), budget)

    while True:
        if pc == count or instructions[pc][0] is Opcode.HALT:
            if pc < count:
                if steps >= budget:
                    return exhausted()
                steps += 1
            for bit in program.tail:
                if steps >= budget:
                    return exhausted()
                if target is not None and (len(out) >= limit or target[len(out)] != bit):
                    return None
                steps += 1
                out.append(bit)
            output = ''.join(out)
            if target is not None and output != target:
                return None
            return RunOutcome(RunKind.HALTED, output, steps)

        state = (pc, acc, ctr)
        if state in seen:
            # The machine is deterministic, so a repeated state means it
            # loops forever from here.
            if target is not None:
                return None
            first_steps, first_len = seen[state]
            period = steps - first_steps
            chunk = out[first_len:]
            output = ''.join(out)
            if chunk:
                offsets = [emitted_at[k] - first_steps for k in range(first_len, len(out))]
                full, rest = divmod(budget - steps, period)
                extra = sum(1 for offset in offsets if offset <= rest)
                output += ''.join(chunk) * full + ''.join(chunk[:extra])
            return RunOutcome(RunKind.EXHAUSTED, output, budget)
        seen[state] = (steps, len(out))

        if steps >= budget:
            return exhausted()
        steps += 1
        op, arg = instructions[pc]

        if op is Opcode.EMIT0 or op is Opcode.EMIT1:
            if steps >= budget:
                return exhausted()
            bit = '0' if op is Opcode.EMIT0 else '1'
            if target is not None and (len(out) >= limit or target[len(out)] != bit):
                return None
            steps += 1
            out.append(bit)
            emitted_at.append(steps)
            pc += 1
        elif op is Opcode.INC:
            acc = min(acc + 1, REGISTER_MAX)
            pc += 1
        elif op is Opcode.DEC:
            acc = max(acc - 1, 0)
            pc += 1
        elif op is Opcode.LDI:
            acc = arg
            pc += 1
        elif op is Opcode.JZ:
            pc = arg if acc == 0 else pc + 1
        else:
            acc, ctr = ctr, acc
            pc += 1


def run(program: ProgramLike, budget: int) -> RunOutcome:
    """Run a program (or raw code) for at most `budget` steps."""
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if isinstance(program, str):
        try:
            program = decode(program)
        except InvalidProgram as err:
            if budget < err.consumed:
                return RunOutcome(RunKind.EXHAUSTED, '', budget)
            return RunOutcome(RunKind.INVALID, '', err.consumed)
    return _execute(program, budget, None)


def run_towards(program: Program, budget: int, target: str) -> Optional[RunOutcome]:
    """Run with output pruning against `target`.

    Halted means `program` prints exactly `target` within budget; Exhausted
    means the budget ran out while the output was still a prefix of
    `target`; None means no budget will ever do.
    """
    return _execute(program, budget, target)


def programs_of_length(length: int) -> Iterator[Program]:
    """Valid programs with |code| == length, in lexicographic order.

    The header length grows with the body length, so at most one body
    length B fits a given code length.
    """
    body_length = 0
    while True:
        header = encode_int(body_length)
        total = len(header) + body_length
        if total > length:
            return
        if total == length:
            break
        body_length += 1
    for bits in itertools.product('01', repeat=body_length):
        try:
            yield decode(header + ''.join(bits))
        except InvalidProgram:
            continue


@lru_cache(maxsize=None)
def program_pool(length: int) -> Tuple[Program, ...]:
    """Memoized programs_of_length."""
    return tuple(programs_of_length(length))


def enumerate_programs(max_code_len: int, ceiling: int = DEFAULT_ENUMERATION_CEILING) -> List[Program]:
    """All valid programs with |code| <= max_code_len, length-lexicographic."""
    if max_code_len > ceiling:
        raise PreconditionFailed(f"code length {max_code_len} above enumeration ceiling {ceiling}")
    programs = []
    for length in range(1, max_code_len + 1):
        programs.extend(program_pool(length))
    logger.debug("enumerated %d programs up to length %d", len(programs), max_code_len)
    return programs


def cached_run(program: ProgramLike, budget: int, store) -> RunOutcome:
    """run() backed by a RunCache."""
    code = program.code if isinstance(program, Program) else program
    hit = store.lookup(code, budget)
    if hit is not None:
        return hit
    outcome = run(program, budget)
    store.executions += 1
    store.record(code, budget, outcome)
    return outcome
