"""Context, pair lookup and error handling shared by every command."""
import functools
import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import click

from src.config import Config
from src.models.bits import DECIDERS, BitStringPrefix
from src.models.complexity import RandomnessThreshold
from src.models.compression import CompressionPair, MdFunction
from src.models.depth import DepthParams
from src.models.program import MACHINE
from src.utils.compression import (builtin_identity, builtin_optimal, builtin_rke, builtin_rkt,
                                   native_sequence)
from src.utils.core import read_dseq
from src.utils.errors import DepthLabError
from src.utils.halting_table import HaltingTable

logger = logging.getLogger(__name__)

BUILTIN_PAIRS = ('identity', 'rkt', 'rke') + tuple(f'optimal-{name}' for name in DECIDERS)
EXIT_USAGE = 2
EXIT_VERIFICATION = 4


@dataclass
class AppContext:
    config: Config
    timestamp: bool = True
    _table: Optional[HaltingTable] = None

    def md(self) -> MdFunction:
        return MdFunction.from_name(self.config.md, self.config.md_cap)

    def window(self, text=None):
        return DepthParams.parse_window(text or self.config.window)

    def threshold(self) -> RandomnessThreshold:
        return RandomnessThreshold.kolmogorov(self.config.epsilon, self.config.t_max)

    def table(self) -> HaltingTable:
        if self._table is None:
            self._table = HaltingTable.build(self.config.table_ceiling, self.config.t_max)
        return self._table

    def native(self, pair_name: str, length: int) -> BitStringPrefix:
        if pair_name == 'identity':
            pair_name = 'rkt'
        decider = DECIDERS.get(pair_name.partition('-')[2]) if pair_name.startswith('optimal') else None
        table = self.table() if pair_name == 'rke' else None
        return native_sequence(pair_name, length, decider, self.threshold(), table)

    def pair(self, name: str, sequence: BitStringPrefix = None) -> CompressionPair:
        md = self.md()
        if name == 'identity':
            if sequence is None:
                raise click.UsageError("the identity pair needs a sequence (--seq)")
            return builtin_identity(sequence, md, sequence.role)
        if name == 'rkt':
            return builtin_rkt(md, self.config.max_sieve_index, self.config.enumeration_ceiling)
        if name == 'rke':
            return builtin_rke(self.threshold(), self.table(), md)
        if name.startswith('optimal-') and name[len('optimal-'):] in DECIDERS:
            return builtin_optimal(DECIDERS[name[len('optimal-'):]], md)
        raise click.UsageError(f"unknown pair {name!r}; choose from {', '.join(BUILTIN_PAIRS)}")

    def sequence(self, path: Optional[str], fallback: str, length: int) -> BitStringPrefix:
        if path:
            return read_dseq(path, role=Path(path).stem)
        return self.native(fallback, length)

    def envelope(self, command: str, result: dict) -> dict:
        payload = {
            'command': command,
            'config_hash': self.config.fingerprint(),
            'machine_variant': MACHINE.variant,
            'config': self.config.to_dict(),
            'result': result,
        }
        if self.timestamp:
            payload['generated_at'] = datetime.now(timezone.utc).isoformat()
        return payload

    def output_path(self, name: str) -> Path:
        path = Path(name)
        if not path.is_absolute() and path.parent == Path('.'):
            path = Path(self.config.output_dir) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_report(self, name: str, command: str, result: dict) -> Path:
        path = self.output_path(name)
        payload = self.envelope(command, result)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n')
        click.echo(json.dumps(payload, sort_keys=True))
        logger.info("wrote %s report to %s", command, path)
        return path


def handle_errors(func):
    """Map depthlab errors to exit codes at the command boundary.

    Commands return an exit code (None means 0).
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            code = func(*args, **kwargs)
        except DepthLabError as err:
            logger.error("%s failed: %s", func.__name__, err)
            click.echo(json.dumps({'error': type(err).__name__, 'message': str(err)}), err=True)
            raise click.exceptions.Exit(err.exit_code)
        except ValueError as err:
            click.echo(json.dumps({'error': 'UsageError', 'message': str(err)}), err=True)
            raise click.exceptions.Exit(EXIT_USAGE)
        if code:
            raise click.exceptions.Exit(code)
    return wrapper
