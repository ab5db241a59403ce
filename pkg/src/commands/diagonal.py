import click

from src.commands.common import EXIT_VERIFICATION, handle_errors
from src.utils.core import write_dseq
from src.utils.depth import diagonal_depth
from src.utils.martingale import diagonal_sequence


@click.command('diagonal')
@click.option('--length', type=int, default=1 << 12, help='Bits of the diagonal sequence to build.')
@click.option('--k', 'k', type=int, default=1, help='Order whose blocks get padded.')
@click.option('--a', 'a', default=None, help='Margin coefficient (default from config).')
@click.option('--out', 'out_path', default='diagonal.dseq')
@click.pass_obj
@handle_errors
def diagonal_cmd(app, length, k, a, out_path):
    """Build the sequence on which every d_k loses inside its own blocks, then
    replay it from the padded program stream for order k and measure its
    margin over copying at the designated checkpoints."""
    a = a or app.config.a
    md = app.md()
    result = diagonal_sequence(length, md)
    path = write_dseq(app.output_path(out_path), result.prefix)
    depth = diagonal_depth(result, k, md, a, calibration=app.config.calibration)
    schedule_path = app.output_path(path.stem + '.schedule.jsonl')
    schedule_path.write_text(result.schedule.to_jsonl())
    report = {
        **result.to_dict(),
        'dseq': str(path),
        'schedule': str(schedule_path),
        'k': k,
        'program_length': depth.extra['program_length'],
        'replayed_bits': depth.extra['replayed_bits'],
        'checkpoints': depth.extra['designated'],
        'depth': depth.to_dict(),
    }
    app.write_report('diagonal.json', 'diagonal', report)
    ok = result.nonincreasing and depth.checks_ok
    return 0 if ok else EXIT_VERIFICATION
