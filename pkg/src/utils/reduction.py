"""Monotone reductions between sequences: the built-in library, their
verification, the chunked inverter and the slow-growth transfer of depth
from M(T) back to T."""
import logging
import math
import random
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from src.models.bits import BitStringPrefix, compatible
from src.models.compression import CompressionPair, FamilyKind, MdFunction, Tape, TimeBoundFamily
from src.models.depth import DepthParams
from src.models.reduction import (InversionResult, MonotoneReduction, ReductionReport,
                                  SlowGrowthReport)
from src.utils.complexity import DEFAULT_MAX_SIEVE_INDEX, rkt_char_prefix
from src.utils.compression import DEFAULT_CALIBRATION, builtin_identity, builtin_rkt, capture_trace
from src.utils.core import ilog
from src.utils.depth import margin_series
from src.utils.errors import AmbiguousChunk, HypothesisUnmet, NoChunkFound, PreconditionFailed
from src.utils.utm import DEFAULT_ENUMERATION_CEILING

logger = logging.getLogger(__name__)

EXHAUSTIVE_PAIR_LENGTH = 10
DEFAULT_SAMPLE_BUDGET = 256
# Below this image length inversion searches preimages directly.
SMALL_IMAGE = 4
MAX_REPORTED_VIOLATIONS = 10

Inverter = Callable[..., InversionResult]


def _flip(bit):
    return '1' if bit == '0' else '0'


def _prefix_xor(w):
    out = []
    parity = '0'
    for bit in w:
        parity = _flip(parity) if bit == '1' else parity
        out.append(parity)
    return ''.join(out)


# Bit r of each 4-bit block is XORed with the block bits at these offsets;
# the transform is unitriangular, so it permutes {0,1}^4 and stays causal.
_BLOCK_TAPS = ((), (0,), (0,), (1, 2))


def _block_triangular(w):
    out = []
    for index, bit in enumerate(w):
        base = index - index % 4
        value = bit
        for offset in _BLOCK_TAPS[index % 4]:
            if w[base + offset] == '1':
                value = _flip(value)
        out.append(value)
    return ''.join(out)


def _sparse_stuff(w):
    out = []
    for n, bit in enumerate(w, 1):
        out.append(bit)
        if n & (n - 1) == 0:
            out.append('0')
    return ''.join(out)


REDUCTIONS: Dict[str, MonotoneReduction] = {
    'identity': MonotoneReduction('identity', lambda w: w, Fraction(1)),
    'prefix-xor': MonotoneReduction('prefix-xor', _prefix_xor, Fraction(1)),
    'block-permutation': MonotoneReduction('block-permutation', _block_triangular, Fraction(1)),
    'sparse-stuffing': MonotoneReduction('sparse-stuffing', _sparse_stuff, Fraction(2), surjective=False),
}


def get_reduction(name: str) -> MonotoneReduction:
    try:
        return REDUCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown reduction {name!r}; known: {', '.join(REDUCTIONS)}")


def _honesty_bounds(h, n):
    slack = h * ilog(n)
    return n - slack, n + slack


def _all_strings(max_length):
    yield ''
    for length in range(1, max_length + 1):
        for value in range(1 << length):
            yield format(value, f'0{length}b')


def verify_reduction(R: MonotoneReduction, T_prefix: BitStringPrefix,
                     sample_budget: int = DEFAULT_SAMPLE_BUDGET,
                     exhaustive_length: int = EXHAUSTIVE_PAIR_LENGTH, seed: int = 0) -> ReductionReport:
    """Monotonicity and honesty on every prefix of T_prefix; monotone
    injectivity on all inputs up to `exhaustive_length` plus sampled pairs."""
    report = ReductionReport(R.name)
    previous = R('')
    for n in range(1, len(T_prefix) + 1):
        image = R(T_prefix.upto(n))
        report.prefixes_checked += 1
        if not image.startswith(previous) and report.monotone_ok:
            report.fail('monotone', f"M(T[1..{n}]) does not extend M(T[1..{n - 1}])")
        low, high = _honesty_bounds(R.h, n)
        if n >= 2 and not low <= len(image) <= high and report.honesty_ok:
            report.fail('honesty', f"|M(T[1..{n}])| = {len(image)} outside [{low}, {high}]")
        previous = image

    by_image: Dict[str, List[str]] = {}
    for x in _all_strings(exhaustive_length):
        by_image.setdefault(R(x), []).append(x)
    found = 0
    for image, sources in by_image.items():
        for cut in range(len(image) + 1):
            for y in by_image.get(image[:cut], ()):
                for x in sources:
                    report.pairs_checked += 1
                    if not compatible(x, y) and found < MAX_REPORTED_VIOLATIONS:
                        report.fail('injective', f"M({x!r}) ~ M({y!r}) but the inputs are incompatible")
                        found += 1

    rng = random.Random(seed)
    for _ in range(sample_budget):
        x = ''.join(rng.choice('01') for _ in range(rng.randint(1, 4 * exhaustive_length)))
        cut = rng.randint(0, len(x))
        y = x[:cut] + ''.join(rng.choice('01') for _ in range(rng.randint(0, 2 * exhaustive_length)))
        report.pairs_checked += 1
        if compatible(R(x), R(y)) and not compatible(x, y) and found < MAX_REPORTED_VIOLATIONS:
            report.fail('injective', f"sampled M({x!r}) ~ M({y!r}) but the inputs are incompatible")
            found += 1
    logger.info("reduction %s: all_ok=%s over %d prefixes and %d pairs",
                R.name, report.all_ok, report.prefixes_checked, report.pairs_checked)
    return report


def invert(R: MonotoneReduction, y: str, exact: bool = True) -> InversionResult:
    """Longest x with M(x) = y (exact) or M(x) ⊑ y (partial).

    x is grown in chunks of ilog|y| bits until it reaches |y| - 2h ilog|y|;
    each round keeps the one chunk z with M(xz) ⊑ y. A final depth-first
    search then tries extensions of up to 4h ilog|y| bits, pruned wherever
    M(xz) leaves y.
    """
    m = len(y)
    tests = 0

    def fits(candidate):
        nonlocal tests
        tests += 1
        image = R(candidate)
        return y.startswith(image), len(image) == m

    x = ''
    rounds = 0
    if m <= SMALL_IMAGE:
        reach = m + math.ceil(R.h * ilog(m))
    else:
        width = max(1, ilog(m))
        target = m - math.ceil(2 * R.h * ilog(m))
        while len(x) < target:
            rounds += 1
            found = None
            for value in range(1 << width):
                z = format(value, f'0{width}b')
                if fits(x + z)[0]:
                    if found is not None:
                        raise AmbiguousChunk(f"{R.name}: two chunks fit at round {rounds}",
                                             witness=(x + found, x + z))
                    found = z
            if found is None:
                if exact:
                    raise NoChunkFound(f"{R.name}: no chunk extends {len(x)} bits towards the image",
                                       round_index=rounds)
                break
            x += found
            logger.debug("inversion round %d: %d of %d target bits", rounds, len(x), target)
        reach = math.ceil(4 * R.h * ilog(m))

    best = None
    stack = [x]
    while stack:
        candidate = stack.pop()
        prefix_ok, full = fits(candidate)
        if not prefix_ok:
            continue
        if full or not exact:
            if best is None or len(candidate) > len(best):
                best = candidate
            elif len(candidate) == len(best) and candidate != best:
                raise AmbiguousChunk(f"{R.name}: two maximal preimages of equal length",
                                     witness=(best, candidate))
        if len(candidate) - len(x) < reach:
            stack.extend((candidate + '1', candidate + '0'))
    if best is None:
        raise NoChunkFound(f"{R.name}: no extension of {len(x)} bits maps onto the image",
                           round_index=rounds + 1)
    return InversionResult(best, rounds, tests)


def _composed_family(family: TimeBoundFamily, degree: int) -> TimeBoundFamily:
    if family.kind is FamilyKind.REC:
        return family
    if family.kind is FamilyKind.LIN:
        return TimeBoundFamily(FamilyKind.LIN, family.k + 1)
    return TimeBoundFamily.poly(max(family.k, degree))


def _covering_preimages(R, s, x, limit):
    """Shortest extensions xz, |z| <= limit, with M(xz) ⊒ s."""
    frontier = [x]
    for _ in range(limit + 1):
        hits = [c for c in frontier if R(c).startswith(s)]
        if hits:
            return hits
        frontier = [c + b for c in frontier if s.startswith(R(c)) for b in '01']
    return []


def pull_back(R: MonotoneReduction, pair_T: CompressionPair, inverter: Inverter = invert) -> CompressionPair:
    """Pair for S = M(T): D1 = M ∘ D and C1 = C ∘ N."""
    def decompressor(bits, tape):
        inner = Tape(tape.j, tape.cap)
        pair_T.decompressor(bits, inner)
        image = R(inner.output)
        tape.tick(inner.steps)
        tape.emit(image[:tape.cap] if tape.cap is not None else image)

    compressor = None
    if pair_T.compressor is not None:
        def compressor(s, tape):
            result = inverter(R, s, exact=False)
            tape.tick(result.tests * max(1, len(s)))
            candidates = []
            for x in _covering_preimages(R, s, result.x, math.ceil(R.h * ilog(len(s))) + 1):
                candidates.extend(pair_T.compressor(x, tape))
            return candidates

    return replace(pair_T, name=f"{R.name}<-{pair_T.name}", decompressor=decompressor, compressor=compressor,
                   family=_composed_family(pair_T.family, 2), sequence_id=f"{R.name}({pair_T.sequence_id})")


def push_forward(R: MonotoneReduction, pair_S: CompressionPair, inverter: Inverter = invert) -> CompressionPair:
    """Pair for T: D' = N ∘ D2 and C' = C2 ∘ M."""
    def decompressor(bits, tape):
        inner = Tape(tape.j, tape.cap)
        pair_S.decompressor(bits, inner)
        result = inverter(R, inner.output, exact=False)
        tape.tick(inner.steps + result.tests * max(1, len(inner)))
        tape.emit(result.x[:tape.cap] if tape.cap is not None else result.x)

    compressor = None
    if pair_S.compressor is not None:
        def compressor(x, tape):
            image = R(x)
            tape.tick(len(image))
            return pair_S.compressor(image, tape)

    return replace(pair_S, name=f"{pair_S.name}->{R.name}", decompressor=decompressor, compressor=compressor,
                   family=_composed_family(pair_S.family, 3), sequence_id=f"{R.name}^-1({pair_S.sequence_id})")


def slow_growth_b(a, h) -> Fraction:
    return 2 * Fraction(a) + 6 * Fraction(h)


def slow_growth_experiment(R: MonotoneReduction, weak_T: CompressionPair, strong_S: CompressionPair,
                           params: DepthParams, calibration: int = DEFAULT_CALIBRATION,
                           strict: bool = False) -> SlowGrowthReport:
    """Transfer depth of S = M(T) to T.

    The source side is held to b = 2a + 6h against the pulled-back weak
    pair; the target side compares weak_T with strong_S pushed forward. The
    intermediate bounds of the transfer are recorded as checks on the target
    report.
    """
    hi = params.window[1]
    weak_S = pull_back(R, weak_T)
    strong_T = push_forward(R, strong_S)
    weak_T_trace = capture_trace(weak_T, hi, calibration)
    weak_S_trace = capture_trace(weak_S, hi, calibration)
    strong_S_trace = capture_trace(strong_S, hi, calibration)
    strong_T_trace = capture_trace(strong_T, hi, calibration)

    b = slow_growth_b(params.a, R.h)
    source = margin_series(weak_S_trace, strong_S_trace, DepthParams(b, params.window))
    source.side = 'S'
    target = margin_series(weak_T_trace, strong_T_trace, params)
    target.side = 'T'
    result = SlowGrowthReport(R, b, source, target)

    failing = [j for j, m in source.margins if m < 0]
    if failing:
        err = HypothesisUnmet(f"S-side margins below b*ilog at j in {failing}")
        result.hypothesis_met = False
        result.hypothesis_failures = failing
        target.extra['hypothesis'] = {'error': type(err).__name__, 'message': str(err)}
        logger.warning("slow growth premise unmet for %s: %s", R.name, err)
        if strict:
            raise err

    d_i, d1_i = weak_T_trace.as_map(), weak_S_trace.as_map()
    d2_i, dp_i = strong_S_trace.as_map(), strong_T_trace.as_map()
    for j in range(1, hi + 1):
        if d_i[j] >= 2:
            target.record_check('pull_back_loss', j, d1_i[j] >= d_i[j] - R.h * ilog(d_i[j]))
        if d2_i[j] >= 2:
            target.record_check('push_forward_loss', j, dp_i[j] >= d2_i[j] - 2 * R.h * ilog(d2_i[j]))
    for j in params.indices:
        target.record_check('pulled_log_half', j, 2 * ilog(d1_i[j]) >= ilog(d_i[j]))
        target.record_check('pushed_log_double', j, ilog(dp_i[j]) <= 2 * ilog(d2_i[j]))
    return result


def rkt_slow_growth(R: MonotoneReduction, md: MdFunction, a, window: Tuple[int, int],
                    calibration: int = DEFAULT_CALIBRATION, max_index: int = DEFAULT_MAX_SIEVE_INDEX,
                    ceiling: int = DEFAULT_ENUMERATION_CEILING, strict: bool = False) -> SlowGrowthReport:
    """Slow growth with S = R_Kt, T its preimage under M, weak_T the identity
    on T and strong_S the sieve pair."""
    hi = window[1]
    S = rkt_char_prefix(md(hi), max_index, ceiling)
    T = BitStringPrefix(invert(R, S.bits, exact=False).x, f"{R.name}^-1(R_Kt)")
    if len(T) < hi:
        raise PreconditionFailed(f"R_Kt[1..{len(S)}] pulls back to only {len(T)} bits under {R.name}")
    check = verify_reduction(R, T)
    weak_T = builtin_identity(T, md, T.role)
    strong_S = builtin_rkt(md, max_index, ceiling)
    report = slow_growth_experiment(R, weak_T, strong_S, DepthParams(a, window), calibration, strict)
    report.reduction_check = check
    return report
