import click

from src.commands.common import EXIT_VERIFICATION, handle_errors
from src.utils.reduction import REDUCTIONS, get_reduction, rkt_slow_growth


@click.command('reduce')
@click.option('--r', 'reduction_name', type=click.Choice(sorted(REDUCTIONS)), required=True)
@click.option('--experiment', type=click.Choice(['rkt']), default='rkt')
@click.option('--a', 'a', default=None, help='Margin coefficient (default from config).')
@click.option('--window', default=None, help='j_lo:j_hi (default from config).')
@click.option('--strict', is_flag=True, help='Fail when the source-side premise does not hold.')
@click.pass_obj
@handle_errors
def reduce_cmd(app, reduction_name, experiment, a, window, strict):
    """Carry the depth of R_Kt back through a monotone reduction."""
    cfg = app.config
    report = rkt_slow_growth(get_reduction(reduction_name), app.md(), a or cfg.a, app.window(window),
                             cfg.calibration, cfg.max_sieve_index, cfg.enumeration_ceiling, strict)
    app.write_report(f'reduce-{reduction_name}-{experiment}.json', 'reduce', report.to_dict())
    ok = report.target.ae_on_window and report.target.checks_ok and report.reduction_check.all_ok
    return 0 if ok else EXIT_VERIFICATION
