import click

from src.commands.common import BUILTIN_PAIRS, EXIT_VERIFICATION, handle_errors
from src.models.program import MACHINE
from src.utils.compression import capture_trace, corrupt_decompressor, verify_pair
from src.utils.errors import DepthLabError


@click.command('trace')
@click.option('--pair', 'pair_name', type=click.Choice(BUILTIN_PAIRS), required=True)
@click.option('--jmax', type=int, required=True)
@click.option('--seq', 'seq_path', default=None, help='.dseq file for the identity pair (default: R_Kt).')
@click.option('--out', 'out_path', default=None, help='Target JSONL file (default <pair>.trace.jsonl).')
@click.pass_obj
@handle_errors
def trace_cmd(app, pair_name, jmax, seq_path, out_path):
    """Record i_{D,j} for j = 1..jmax as JSONL."""
    sequence = app.sequence(seq_path, 'rkt', jmax) if pair_name == 'identity' else None
    pair = app.pair(pair_name, sequence)
    path = app.output_path(out_path or f'{pair_name}.trace.jsonl')
    extra = {'config_hash': app.config.fingerprint(), 'machine_variant': MACHINE.variant}
    try:
        trace = capture_trace(pair, jmax, app.config.calibration)
    except DepthLabError as err:
        partial = getattr(err, 'trace', None)
        if partial is not None:
            path.write_text(partial.to_jsonl(extra))
        raise
    path.write_text(trace.to_jsonl(extra))
    click.echo(trace.to_jsonl(extra), nl=False)


@click.command('verify')
@click.option('--pair', 'pair_name', type=click.Choice(BUILTIN_PAIRS), required=True)
@click.option('--imax', type=int, required=True)
@click.option('--jmax', type=int, required=True)
@click.option('--seq', 'seq_path', default=None, help='.dseq file for the identity pair (default: R_Kt).')
@click.option('--fault', type=int, default=None, help='Flip this output bit of D before verifying.')
@click.pass_obj
@handle_errors
def verify_cmd(app, pair_name, imax, jmax, seq_path, fault):
    """Check a built-in pair against both compression conditions on its sequence."""
    sequence = app.sequence(seq_path, pair_name, imax)
    pair = app.pair(pair_name, sequence if pair_name == 'identity' else None)
    if fault is not None:
        pair = corrupt_decompressor(pair, fault)
    report = verify_pair(pair, sequence, imax, jmax, app.config.calibration, app.config.candidate_limit)
    app.write_report(f'{pair.name}.verify.json', 'verify', report.to_dict())
    return 0 if report.all_ok else EXIT_VERIFICATION
