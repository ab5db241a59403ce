import json
from pathlib import Path

import click

from src.commands.common import BUILTIN_PAIRS, EXIT_VERIFICATION, handle_errors
from src.models.compression import Trace
from src.models.depth import DepthParams
from src.utils.compression import capture_trace
from src.utils.depth import (margin_series, rke_depth_experiment, rkt_depth_experiment,
                             shallow_witness_optimal, shallow_witness_random)

STRONG_PAIRS = tuple(name for name in BUILTIN_PAIRS if name != 'identity')


def _load_trace(path):
    return Trace.from_jsonl(Path(path).read_text())


@click.command('depth')
@click.option('--weak', 'weak_name', type=click.Choice(['identity']), default='identity')
@click.option('--strong', 'strong_name', type=click.Choice(STRONG_PAIRS), required=True)
@click.option('--a', 'a', default=None, help='Margin coefficient (default from config).')
@click.option('--window', default=None, help='j_lo:j_hi (default from config).')
@click.option('--weak-trace', default=None, help='Use a recorded weak trace instead of running the pair.')
@click.option('--strong-trace', default=None, help='Use a recorded strong trace instead of running the pair.')
@click.option('--csv', 'csv_path', default=None, help='Also write the margins as CSV.')
@click.pass_obj
@handle_errors
def depth_cmd(app, weak_name, strong_name, a, window, weak_trace, strong_trace, csv_path):
    """Depth margins of the strong pair over the identity on its own sequence."""
    a = a or app.config.a
    window = app.window(window)
    cfg = app.config
    if weak_trace and strong_trace:
        report = margin_series(_load_trace(weak_trace), _load_trace(strong_trace), DepthParams(a, window))
    elif strong_name == 'rkt':
        report = rkt_depth_experiment(app.md(), a, window, calibration=cfg.calibration,
                                      max_index=cfg.max_sieve_index, ceiling=cfg.enumeration_ceiling)
    elif strong_name == 'rke':
        report = rke_depth_experiment(app.threshold(), app.table(), a, window, app.md(),
                                      calibration=cfg.calibration)
    else:
        hi = window[1]
        weak = app.pair(weak_name, app.native(strong_name, hi))
        strong = app.pair(strong_name)
        report = margin_series(capture_trace(weak, hi, cfg.calibration),
                               capture_trace(strong, hi, cfg.calibration), DepthParams(a, window))
    app.write_report(f'depth-{strong_name}.json', 'depth', report.to_dict())
    if csv_path:
        app.output_path(csv_path).write_text(report.margins_csv())
    return 0 if report.checks_ok else EXIT_VERIFICATION


@click.command('shallow')
@click.option('--optimal', 'optimal_name', type=click.Choice(STRONG_PAIRS), required=True,
              help='MD-exact pair whose sequence is tested.')
@click.option('--challenger', 'challenger_name', type=click.Choice(BUILTIN_PAIRS), default='identity')
@click.option('--window', default=None)
@click.option('--c', 'c', type=int, default=0, help='Randomness deficiency allowed to the challenger.')
@click.pass_obj
@handle_errors
def shallow_cmd(app, optimal_name, challenger_name, window, c):
    """Shallowness witnesses against an MD-exact pair and against the identity."""
    window = app.window(window)
    hi = window[1]
    calibration = app.config.calibration
    sequence = app.native(optimal_name, hi)
    optimal = capture_trace(app.pair(optimal_name), hi, calibration)
    identity = capture_trace(app.pair('identity', sequence), hi, calibration)
    challenger = optimal if challenger_name == optimal_name else (
        identity if challenger_name == 'identity' else capture_trace(app.pair(challenger_name), hi, calibration))
    result = {
        'optimal': shallow_witness_optimal(optimal, challenger, window).to_dict(),
        'random': shallow_witness_random(identity, challenger, c, window).to_dict(),
    }
    click.echo(json.dumps(app.envelope('shallow', result), sort_keys=True))
