from fractions import Fraction

import pytest

from src.config import Config
from src.models.complexity import RandomnessThreshold
from src.models.compression import MdFunction, MdKind
from src.models.run_cache import RunCache
from src.utils.halting_table import HaltingTable

SMALL_T_MAX = 256


@pytest.fixture
def md():
    return MdFunction(MdKind.TAMED_EXP, 1 << 10)


@pytest.fixture
def cache():
    store = RunCache('sqlite:///:memory:')
    yield store
    store.close()


@pytest.fixture(scope='session')
def small_table():
    return HaltingTable.build(10, SMALL_T_MAX)


@pytest.fixture
def half_threshold():
    return RandomnessThreshold.kolmogorov(Fraction(1, 2), SMALL_T_MAX)


@pytest.fixture
def small_config(tmp_path):
    return Config(output_dir=str(tmp_path / 'out'), cache_url='sqlite:///:memory:',
                  t_max=SMALL_T_MAX, table_ceiling=10)
