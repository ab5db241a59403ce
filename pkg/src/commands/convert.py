import random

import click

from src.commands.common import BUILTIN_PAIRS, EXIT_VERIFICATION, handle_errors
from src.models.bits import BitStringPrefix
from src.utils.compression import capture_trace
from src.utils.core import parse_bit_literal
from src.utils.martingale import (bettor_library, check_compressor_to_martingale,
                                  check_martingale_to_compressor, compressor_to_martingale,
                                  fairness_violation, library_martingale, martingale_to_compressor,
                                  universal_martingale)


def _martingale(name, k):
    if name.startswith('universal'):
        return universal_martingale(k, len(bettor_library(k)))
    for bettor in bettor_library(k):
        if bettor.name == name:
            return library_martingale(bettor)
    raise click.UsageError(f"no bettor {name!r} at order {k}")


@click.command('convert')
@click.option('--to-martingale', 'direction', flag_value='to-martingale', help='Compression pair -> martingale.')
@click.option('--to-compressor', 'direction', flag_value='to-compressor', help='Martingale -> compression pair.')
@click.option('--pair', 'pair_name', type=click.Choice(BUILTIN_PAIRS), default='identity')
@click.option('--jmax', type=int, default=8)
@click.option('--depth', 'table_depth', type=int, default=6, help='Depth of the exported martingale table.')
@click.option('--bettor', default='universal', help='Library bettor name, or "universal".')
@click.option('--k', 'k', type=int, default=2, help='Bettor order.')
@click.option('--sequence', 'literal', default=None, help='Bit literal to compress (default: random).')
@click.option('--length', type=int, default=64)
@click.option('--seed', type=int, default=0)
@click.option('--savings', is_flag=True, help='Code with the capital-locking version of the bettor.')
@click.pass_obj
@handle_errors
def convert_cmd(app, direction, pair_name, jmax, table_depth, bettor, k, literal, length, seed, savings):
    """Turn a compression pair into a martingale or a martingale into a pair,
    and check the capital/compression inequality along the sequence."""
    if direction is None:
        raise click.UsageError("choose --to-martingale or --to-compressor")
    calibration = app.config.calibration
    if direction == 'to-martingale':
        horizon = app.md()(jmax)
        sequence = app.native(pair_name, horizon)
        pair = app.pair(pair_name, sequence)
        trace = capture_trace(pair, jmax, calibration)
        d = compressor_to_martingale(pair, jmax)
        violation = fairness_violation(d, table_depth)
        report = check_compressor_to_martingale(d, trace, sequence)
        result = {**d.to_dict(), 'fair_to_depth': table_depth, 'fairness_violation': violation,
                  'table': d.to_table(table_depth), 'conversion': report.to_dict()}
        name = f'{pair.name}.martingale.json'
    else:
        if literal:
            bits = parse_bit_literal(literal)
        else:
            rng = random.Random(seed)
            bits = ''.join(rng.choice('01') for _ in range(length))
        w = BitStringPrefix(bits, f'w{seed}')
        d = _martingale(bettor, k)
        pair = martingale_to_compressor(d, app.md(), w, savings=savings)
        d = pair.martingale
        trace = capture_trace(pair, max(jmax, len(pair.coder.encode(w.bits))), calibration)
        report = check_martingale_to_compressor(d, trace, w)
        violation = fairness_violation(d, table_depth)
        result = {**pair.to_dict(), 'martingale': d.to_dict(), 'fairness_violation': violation,
                  'code_length': len(pair.coder.encode(w.bits)), 'conversion': report.to_dict()}
        name = f"{d.name.replace('/', '_')}.compressor.json"
    app.write_report(name, 'convert', result)
    return 0 if report.holds and violation is None else EXIT_VERIFICATION
