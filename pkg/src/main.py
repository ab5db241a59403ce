import logging
import os
import sys
# DON'T CHANGE THIS !!!
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

import click
from dotenv import load_dotenv

from src.commands.common import AppContext
from src.commands.convert import convert_cmd
from src.commands.depth import depth_cmd, shallow_cmd
from src.commands.diagonal import diagonal_cmd
from src.commands.kt import kt_cmd, run_cmd
from src.commands.reduce import reduce_cmd
from src.commands.sequence import seq_cmd
from src.commands.trace import trace_cmd, verify_cmd
from src.config import Config

# Load environment variables
load_dotenv()

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level):
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level.upper())


def create_cli():
    @click.group()
    @click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False), default=None,
                  help='KEY=VALUE settings file.')
    @click.option('--md', default=None, help='MD function: TamedExp, Quadratic or PaperDoubleExp.')
    @click.option('--md-cap', type=int, default=None)
    @click.option('--t-max', type=int, default=None)
    @click.option('--epsilon', default=None)
    @click.option('--out-dir', 'output_dir', default=None)
    @click.option('--cache-url', default=None)
    @click.option('--log-level', default=None)
    @click.option('--no-timestamp', is_flag=True, help='Omit generation times so reports are byte-stable.')
    @click.pass_context
    def cli(ctx, config_file, no_timestamp, **flags):
        """Monotone polynomial depth lab."""
        try:
            config = Config.load(config_file, flags)
        except ValueError as err:
            raise click.UsageError(str(err))
        configure_logging(config.log_level)
        ctx.obj = AppContext(config, timestamp=not no_timestamp)

    # Register commands
    for command in (kt_cmd, run_cmd, seq_cmd, trace_cmd, verify_cmd, depth_cmd, shallow_cmd,
                    convert_cmd, diagonal_cmd, reduce_cmd):
        cli.add_command(command)
    return cli


cli = create_cli()


def main():
    cli(prog_name='depthlab')


if __name__ == '__main__':
    main()
