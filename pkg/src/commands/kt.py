import json

import click

from src.commands.common import handle_errors
from src.models.run_cache import RunCache
from src.utils.complexity import in_rkt, kt
from src.utils.core import parse_bit_literal
from src.utils.utm import cached_run, decode


@click.command('kt')
@click.argument('literal')
@click.option('--max-length', type=int, default=None, help='Largest |x| accepted (default from config).')
@click.pass_obj
@handle_errors
def kt_cmd(app, literal, max_length):
    """Exact Levin complexity of a bit string (0b..., 0x... or bare binary)."""
    x = parse_bit_literal(literal)
    max_length = max_length or app.config.kt_max_length
    value = kt(x, max_length=max_length, ceiling=app.config.enumeration_ceiling)
    record = value.to_dict(x)
    record['in_rkt'] = in_rkt(x, max_length)
    click.echo(json.dumps(app.envelope('kt', record), sort_keys=True))


@click.command('run')
@click.argument('code')
@click.option('--budget', type=int, required=True)
@click.option('--disassemble', is_flag=True, help='Include the decoded instruction listing.')
@click.pass_obj
@handle_errors
def run_cmd(app, code, budget, disassemble):
    """Run one program on the fixed machine through the run cache."""
    code = parse_bit_literal(code)
    cache = RunCache(app.config.cache_url)
    try:
        outcome = cached_run(code, budget, cache)
        record = {'code': code, 'budget': budget, **outcome.to_dict(), 'cache': cache.stats()}
        if disassemble:
            record['program'] = decode(code).to_dict()
    finally:
        cache.close()
    click.echo(json.dumps(app.envelope('run', record), sort_keys=True))
