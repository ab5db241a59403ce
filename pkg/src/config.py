import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

from dotenv import dotenv_values, load_dotenv

from src.models.program import MACHINE

ENV_PREFIX = 'DEPTHLAB_'


@dataclass
class Config:
    """Resolved settings for one depthlab invocation.

    Precedence: defaults < config file < DEPTHLAB_* environment < flags.
    """

    machine_variant: str = MACHINE.variant
    md: str = 'TamedExp'
    # Desk scale; MdFunction() itself defaults to 2^20.
    md_cap: int = 1 << 10
    t_max: int = 1 << 16
    enumeration_ceiling: int = 28
    table_ceiling: int = 16
    kt_max_length: int = 10
    max_sieve_index: int = 1 << 16
    window: str = '3:8'
    a: Fraction = Fraction(1)
    epsilon: Fraction = Fraction(1, 2)
    candidate_limit: int = 64
    calibration: int = 16
    cache_url: str = 'sqlite:///depthlab_runs.db'
    output_dir: str = 'out'
    log_level: str = 'WARNING'

    @classmethod
    def load(cls, config_file=None, overrides=None):
        config = cls()
        if config_file:
            config._apply(dotenv_values(config_file), source=str(config_file))
        load_dotenv()
        config._apply({key[len(ENV_PREFIX):]: value for key, value in os.environ.items()
                       if key.startswith(ENV_PREFIX)}, source='environment')
        config._apply(overrides or {}, source='flags')
        config.validate()
        return config

    def _apply(self, values, source):
        known = {f.name: f.type for f in fields(self)}
        for key, raw in values.items():
            if raw is None:
                continue
            name = key.lower()
            if name not in known:
                if source == 'environment':
                    continue
                raise ValueError(f"unknown setting {key!r} in {source}")
            kind = known[name]
            try:
                if kind in (int, 'int'):
                    value = int(raw)
                elif kind in (Fraction, 'Fraction'):
                    value = Fraction(raw)
                else:
                    value = str(raw)
            except (TypeError, ValueError):
                raise ValueError(f"setting {key}={raw!r} from {source} is not a valid {getattr(kind, '__name__', kind)}")
            setattr(self, name, value)

    def validate(self):
        if self.machine_variant != MACHINE.variant:
            raise ValueError(f"machine variant {self.machine_variant!r} is not available, only {MACHINE.variant!r}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.a <= 0:
            raise ValueError(f"a must be positive, got {self.a}")
        for name in ('md_cap', 't_max', 'enumeration_ceiling', 'table_ceiling', 'kt_max_length',
                     'max_sieve_index', 'candidate_limit', 'calibration'):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def to_dict(self):
        values = asdict(self)
        values['a'] = str(self.a)
        values['epsilon'] = str(self.epsilon)
        return values

    def fingerprint(self):
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode()).hexdigest()
