import json

import click

from src.commands.common import BUILTIN_PAIRS, handle_errors
from src.utils.core import write_dseq

SEQUENCE_KINDS = tuple(name for name in BUILTIN_PAIRS if name != 'identity')


@click.command('seq')
@click.argument('kind', type=click.Choice(SEQUENCE_KINDS))
@click.option('--bits', 'length', type=int, required=True, help='Number of sequence bits to materialize.')
@click.option('--out', 'out_path', default=None, help='Target .dseq file (default <kind>.dseq).')
@click.pass_obj
@handle_errors
def seq_cmd(app, kind, length, out_path):
    """Materialize the characteristic prefix of a built-in sequence."""
    prefix = app.native(kind, length)
    path = write_dseq(app.output_path(out_path or f'{kind}.dseq'), prefix)
    summary = {**prefix.to_dict(), 'path': str(path), 'ones': prefix.bits.count('1')}
    click.echo(json.dumps(app.envelope('seq', summary), sort_keys=True))
