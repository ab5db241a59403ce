"""Levin complexity Kt, step-capped K and randomness membership over the
reference machine."""
import itertools
import logging
from functools import lru_cache
from typing import Dict, Optional, Tuple

from src.models.bits import BitStringPrefix, check_bits
from src.models.complexity import KtValue, RandomnessThreshold, ThresholdKind
from src.models.compression import TimeBoundFamily
from src.models.program import Program, RunOutcome
from src.utils.core import ilog, string_index
from src.utils.errors import PreconditionFailed, SearchBudgetExceeded
from src.utils.utm import (DEFAULT_ENUMERATION_CEILING, enumerate_programs,
                           kt_literal_bound, literal_program, program_pool, run,
                           run_towards)

logger = logging.getLogger(__name__)

DEFAULT_KT_MAX_LENGTH = 10
DEFAULT_MAX_SIEVE_INDEX = 1 << 16

LEVIN = RandomnessThreshold.levin()

_oracle_runs: Dict[Tuple[str, int], RunOutcome] = {}


def _check_length(x, max_length):
    check_bits(x)
    if len(x) > max_length:
        raise PreconditionFailed(f"|x| = {len(x)} exceeds the configured maximum {max_length}")


def kt(x: str, max_length: int = DEFAULT_KT_MAX_LENGTH, b_max: Optional[int] = None,
       ceiling: int = DEFAULT_ENUMERATION_CEILING) -> KtValue:
    """Exact Kt(x) by Levin rounds.

    Round K runs every program p with |p| <= K for 2^(K-|p|) steps. The first
    round with a program halting on exactly x has value K, because a witness
    with |p| + ilog(t) < K would have halted in an earlier round.
    """
    _check_length(x, max_length)
    if b_max is None:
        b_max = kt_literal_bound(x)
    dead = set()
    for rank in range(b_max + 1):
        for length in range(1, min(rank, ceiling) + 1):
            budget = 1 << (rank - length)
            # Decoding and printing alone take |p| + |x| steps.
            if budget < length + len(x):
                continue
            for program in program_pool(length):
                if program.code in dead:
                    continue
                outcome = run_towards(program, budget, x)
                if outcome is None:
                    dead.add(program.code)
                elif outcome.halted:
                    value = length + ilog(outcome.steps)
                    logger.debug("kt(%s) = %d via %s in %d steps", x, value, program.code, outcome.steps)
                    return KtValue(value, program, outcome.steps)
        logger.debug("kt(%s): round %d found no witness, %d programs ruled out", x, rank, len(dead))
    raise SearchBudgetExceeded(f"no witness for {x!r} with |p| + log t <= {b_max}", lower_bound=b_max + 1)


def _oracle_run(program: Program, budget: int) -> RunOutcome:
    key = (program.code, budget)
    if key not in _oracle_runs:
        _oracle_runs[key] = run(program, budget)
    return _oracle_runs[key]


def kt_oracle(x: str, ceiling: int = DEFAULT_ENUMERATION_CEILING) -> KtValue:
    """Brute-force Kt: every program up to the literal bound at every budget
    2^b, no output pruning. Used to cross-check kt()."""
    check_bits(x)
    bound = kt_literal_bound(x)
    best = None
    for program in enumerate_programs(min(bound, ceiling), ceiling):
        for exponent in range(bound - len(program.code) + 1):
            outcome = _oracle_run(program, 1 << exponent)
            if not outcome.halted or outcome.output != x:
                continue
            value = len(program.code) + ilog(outcome.steps)
            if best is None or value < best.value:
                best = KtValue(value, program, outcome.steps)
    return best


def _has_witness_below(x: str, threshold: int, budget_for) -> bool:
    """Whether some program shorter than `threshold` halts on exactly x
    within budget_for(|p|) steps."""
    for length in range(1, threshold):
        budget = budget_for(length)
        if budget < length + len(x):
            continue
        for program in program_pool(length):
            outcome = run_towards(program, budget, x)
            if outcome is not None and outcome.halted:
                return True
    return False


def in_rkt(x: str, max_length: int = DEFAULT_KT_MAX_LENGTH) -> bool:
    """x ∈ R_Kt: no witness with |p| + ilog(t) < |x| + ilog(|x|)."""
    _check_length(x, max_length)
    tau = LEVIN.threshold(len(x))
    return not _has_witness_below(x, tau, lambda length: 1 << (tau - 1 - length))


def count_rkt_members(n: int, max_length: int = DEFAULT_KT_MAX_LENGTH) -> int:
    return sum(1 for bits in itertools.product('01', repeat=n) if in_rkt(''.join(bits), max_length))


@lru_cache(maxsize=128)
def _rkt_sieve(i: int, ceiling: int) -> Tuple[str, int]:
    """R_Kt[1..i] and the machine steps spent building it."""
    width = ilog(i)
    horizon = width + ilog(width)
    if horizon > ceiling:
        raise PreconditionFailed(f"sieve for i={i} needs programs up to {horizon} bits")
    marked = set()
    work = 0
    for length in range(1, horizon):
        # Only runs with |p| + ilog(t) < horizon can mark anything, so the
        # 2^horizon cap shrinks to 2^(horizon - 1 - |p|) without changing the result.
        budget = 1 << (horizon - 1 - length)
        for program in program_pool(length):
            outcome = run(program, budget)
            work += outcome.steps
            if not outcome.halted or len(outcome.output) > width:
                continue
            if length + ilog(outcome.steps) < LEVIN.threshold(len(outcome.output)):
                marked.add(outcome.output)
    bits = ''.join('0' if string_index(m - 1) in marked else '1' for m in range(1, i + 1))
    logger.debug("sieve to %d: %d machine steps over programs below %d bits, %d strings marked",
                 i, work, horizon, len(marked))
    return bits, work + i


def rkt_char_prefix(i: int, max_index: int = DEFAULT_MAX_SIEVE_INDEX,
                    ceiling: int = DEFAULT_ENUMERATION_CEILING) -> BitStringPrefix:
    if i < 1 or i > max_index:
        raise PreconditionFailed(f"sieve index {i} outside 1..{max_index}")
    bits, _ = _rkt_sieve(i, ceiling)
    return BitStringPrefix(bits, 'R_Kt')


def rkt_sieve_work(i: int, ceiling: int = DEFAULT_ENUMERATION_CEILING) -> int:
    return _rkt_sieve(i, ceiling)[1]


def k_capped(x: str, T: int, ceiling: int = DEFAULT_ENUMERATION_CEILING) -> Optional[int]:
    """Shortest code length printing x within T steps; None stands for infinity.

    Every halting program printing x takes at least |p| + |x| steps, and the
    literal program takes |lit| + |x| + 1, so nothing longer than the literal
    can beat it and the search stops there.
    """
    check_bits(x)
    if T <= 0:
        return None
    top = min(len(literal_program(x).code), T - len(x))
    if top > ceiling:
        raise PreconditionFailed(f"search up to {top} bits exceeds enumeration ceiling {ceiling}")
    for length in range(1, top + 1):
        for program in program_pool(length):
            outcome = run_towards(program, T, x)
            if outcome is not None and outcome.halted:
                return length
    return None


def k_time_bounded(x: str, t: TimeBoundFamily, ceiling: int = DEFAULT_ENUMERATION_CEILING) -> Optional[int]:
    bound = t.bound(len(x))
    if bound is None:
        raise PreconditionFailed(f"{t.label} carries no explicit time bound")
    return k_capped(x, bound, ceiling)


def in_rke(x: str, thr: RandomnessThreshold) -> bool:
    """x ∈ R̂_{K,ε}: no program shorter than ⌈ε|x|⌉ prints x within T_max.

    Equivalent to k_capped(x, T_max) >= ⌈ε|x|⌉ but only enumerates below
    the threshold.
    """
    if thr.kind is not ThresholdKind.KOLMOGOROV_FRACTION:
        raise PreconditionFailed("in_rke needs a Kolmogorov-fraction threshold")
    check_bits(x)
    threshold = thr.threshold(len(x))
    return not _has_witness_below(x, threshold, lambda length: thr.t_max)
