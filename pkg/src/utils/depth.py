"""Depth margins between a weak and a strong compression pair, shallowness
witnesses, and the depth experiments for R_Kt, R̂_{K,ε} and the diagonal sequence."""
import logging
import math
from fractions import Fraction
from typing import Dict, Optional, Tuple

from src.models.complexity import RandomnessThreshold
from src.models.compression import CompressionPair, FamilyKind, MdFunction, Trace
from src.models.depth import DepthNotion, DepthParams, DepthReport, ShallowWitness
from src.utils.complexity import DEFAULT_MAX_SIEVE_INDEX, rkt_char_prefix
from src.utils.compression import (DEFAULT_CALIBRATION, builtin_identity, builtin_rke,
                                   builtin_rkt, capture_trace)
from src.utils.core import floor_log2, ilog
from src.utils.errors import PreconditionFailed, WindowUncovered
from src.utils.halting_table import HaltingTable
from src.utils.martingale import (DiagonalResult, designated_blocks, designated_checks,
                                  padded_program_stream)
from src.utils.utm import DEFAULT_ENUMERATION_CEILING

logger = logging.getLogger(__name__)

Window = Tuple[int, int]


def depth_margin(i_weak: int, i_strong: int, a: Fraction) -> int:
    return i_strong - i_weak - math.ceil(Fraction(a) * ilog(i_strong))


def _require_window(trace: Trace, window: Window):
    if not trace.covers(*window):
        raise WindowUncovered(f"trace of {trace.pair_id} does not cover j in {window[0]}..{window[1]}")


def margin_series(weak: Trace, strong: Trace, params: DepthParams) -> DepthReport:
    _require_window(weak, params.window)
    _require_window(strong, params.window)
    weak_i, strong_i = weak.as_map(), strong.as_map()
    report = DepthReport(weak.pair_id, strong.pair_id, params,
                         weak_family=weak.family, strong_family=strong.family,
                         notion=DepthNotion.for_families(weak.family, strong.family))
    for j in params.indices:
        report.margins.append((j, depth_margin(weak_i[j], strong_i[j], params.a)))
    logger.info("margins %s vs %s on %s: ae=%s io=%d", weak.pair_id, strong.pair_id,
                params.window, report.ae_on_window, report.io_count)
    return report


def shallow_witness_optimal(opt: Trace, challenger: Trace, window: Window) -> ShallowWitness:
    """i_challenger - i_opt < ilog(i_challenger) at every j, given i_opt = MD(j)."""
    _require_window(opt, window)
    _require_window(challenger, window)
    opt_i, other_i = opt.as_map(), challenger.as_map()
    result = ShallowWitness(True)
    for j in range(window[0], window[1] + 1):
        if opt_i[j] != opt.md(j):
            raise PreconditionFailed(f"{opt.pair_id} outputs {opt_i[j]} bits at j={j}, MD(j)={opt.md(j)}")
        result.checked.append(j)
        if other_i[j] - opt_i[j] >= ilog(other_i[j]):
            result.holds = False
    return result


def shallow_witness_random(identity: Trace, challenger: Trace, c: int, window: Window) -> ShallowWitness:
    """Where the challenger gains at most c bits over the identity, its gain
    stays below ilog(i). The j where it gains more are premise failures."""
    _require_window(identity, window)
    _require_window(challenger, window)
    base_i, other_i = identity.as_map(), challenger.as_map()
    result = ShallowWitness(True)
    for j in range(window[0], window[1] + 1):
        gain = other_i[j] - base_i[j]
        if gain > c:
            result.premise_failures.append(j)
            continue
        result.checked.append(j)
        if gain >= ilog(other_i[j]):
            result.holds = False
    if result.premise_failures:
        logger.info("premise i <= j + %d fails at %d window indices", c, len(result.premise_failures))
    return result


def kolmogorov_lemma_constant(epsilon) -> Fraction:
    return Fraction(4) / (1 - Fraction(epsilon))


def _weak_default(weak, sequence, md):
    return weak if weak is not None else builtin_identity(sequence, md, sequence.role)


def rkt_depth_experiment(md: MdFunction, a, window: Window, weak: Optional[CompressionPair] = None,
                         calibration: int = DEFAULT_CALIBRATION,
                         max_index: int = DEFAULT_MAX_SIEVE_INDEX,
                         ceiling: int = DEFAULT_ENUMERATION_CEILING) -> DepthReport:
    params = DepthParams(a, window)
    hi = window[1]
    if md(hi) > max_index:
        raise PreconditionFailed(f"MD({hi}) = {md(hi)} exceeds the sieve limit {max_index}")
    weak = _weak_default(weak, rkt_char_prefix(hi, max_index, ceiling), md)
    if weak.family.kind is not FamilyKind.LIN:
        raise PreconditionFailed(f"weak pair {weak.name} declares {weak.family.label}, expected a Lin family")
    strong = builtin_rkt(md, max_index, ceiling)
    weak_trace = capture_trace(weak, hi, calibration)
    strong_trace = capture_trace(strong, hi, calibration)
    report = margin_series(weak_trace, strong_trace, params)
    weak_i = weak_trace.as_map()
    for j in params.indices:
        i = weak_i[j]
        if 2 * i <= md(j):
            report.record_check('half_md_chain', j, 2 * (md(j) - i) >= md(j))
        # i < 2^(2^(3j) + 1)
        report.record_check('lin_weak_bound', j, i.bit_length() <= (1 << (3 * j)) + 1)
    report.extra = {'md': md.to_dict(), 'max_index': max_index}
    return report


def rke_slack(strong: Trace, epsilon: Fraction, window: Window) -> Dict[int, int]:
    """Per window j, the s_j with 2^(floor(j/ε) - s_j) = 2^floor(log2 i_strong).

    MD clipping makes s_j grow with j; unclipped it would stay constant.
    """
    strong_i = strong.as_map()
    return {j: math.floor(j / epsilon) - floor_log2(strong_i[j]) for j in range(window[0], window[1] + 1)}


def rke_depth_experiment(thr: RandomnessThreshold, table: HaltingTable, a, window: Window,
                         md: MdFunction = MdFunction(), weak: Optional[CompressionPair] = None,
                         calibration: int = DEFAULT_CALIBRATION) -> DepthReport:
    """Margins of the step-capped R̂_{K,ε} pair over the identity.

    One c0 serves the whole run: the smallest slack on the window. The
    'rke_chain' check asserts i_weak < 2^(floor(j/ε) - c0) at every j; the
    chain only implies it where the strong pair reaches 2^(floor(j/ε) - c0),
    and `extra['rke_chain_applies']` lists those j.
    """
    params = DepthParams(a, window)
    hi = window[1]
    if table.t_max != thr.t_max:
        raise PreconditionFailed(f"threshold cap {thr.t_max} differs from table cap {table.t_max}")
    weak = _weak_default(weak, table.rke_char_prefix(hi, thr), md)
    strong = builtin_rke(thr, table, md)
    weak_trace = capture_trace(weak, hi, calibration)
    strong_trace = capture_trace(strong, hi, calibration)
    report = margin_series(weak_trace, strong_trace, params)
    slack = rke_slack(strong_trace, thr.epsilon, window)
    c0 = min(slack.values())
    weak_i = weak_trace.as_map()
    applies = []
    for j in params.indices:
        i = weak_i[j]
        exponent = math.floor(j / thr.epsilon) - c0
        if slack[j] <= c0:
            applies.append(j)
        report.record_check('rke_chain', j, exponent >= 0 and i.bit_length() <= exponent)
        report.record_check('weak_below_2^(j+1)', j, i < (1 << (j + 1)))
    report.extra = {
        'epsilon': str(thr.epsilon),
        't_max': thr.t_max,
        'c0': c0,
        'slack_by_j': {str(j): s for j, s in slack.items()},
        'rke_chain_applies': applies,
        'lemma_constant': str(kolmogorov_lemma_constant(thr.epsilon)),
        'omega': str(table.omega),
        'md': md.to_dict(),
    }
    if len(applies) < params.size:
        report.extra['rke_chain_note'] = (
            f"{md.kind.value} caps the strong output below 2^(floor(j/ε) - {c0}) outside "
            f"{applies}; the chain bound is checked there but not implied")
        logger.info("rke chain bound applies only at j in %s", applies)
    return report


def diagonal_depth(result: DiagonalResult, k: int, md: MdFunction, a=1,
                   weak: Optional[CompressionPair] = None,
                   calibration: int = DEFAULT_CALIBRATION) -> DepthReport:
    """Margins of the padded stream for order k over a weak pair on the
    diagonal sequence, taken at the designated block checkpoints only.

    Between designated checkpoints the padded stream is no better than
    copying, so nothing is claimed there. `extra['md_capped']` lists the j
    where the cap sets MD(j); where it clamps MD(j) down to j the padded
    stream outputs no more than the weak pair and the margin is negative.
    """
    stream = padded_program_stream(result.prefix, result.schedule, k, md)
    designated = designated_blocks(stream, result.schedule)
    if not designated:
        raise PreconditionFailed(f"no complete padded block of order {k} in {len(result.prefix)} bits")
    indices = sorted(j for _, j in designated)
    params = DepthParams(a, (indices[0], indices[-1]))
    weak = _weak_default(weak, result.prefix, md)
    weak_trace = capture_trace(weak, indices[-1], calibration)
    strong_trace = capture_trace(stream.pair, indices[-1], calibration)
    weak_i, strong_i = weak_trace.as_map(), strong_trace.as_map()
    report = DepthReport(weak_trace.pair_id, strong_trace.pair_id, params,
                         weak_family=weak_trace.family, strong_family=strong_trace.family,
                         notion=DepthNotion.for_families(weak_trace.family, strong_trace.family))
    checks = designated_checks(stream, result.schedule, strong_trace)
    for check in checks:
        report.margins.append((check.j, depth_margin(weak_i[check.j], strong_i[check.j], params.a)))
        report.record_check('designated_md', check.j, check.ok)
    report.extra = {
        'k': k,
        'designated': [check.to_dict() for check in checks],
        'md_capped': [j for j in indices if md.capped(j)],
        'program_length': len(stream.bits),
        'replayed_bits': strong_trace.entries[-1].i,
        'md': md.to_dict(),
    }
    logger.info("diagonal depth k=%d: margins %s", k, report.margins)
    return report
