import os
from fractions import Fraction

import pytest

from src.config import Config
from src.models.compression import MdFunction


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for key in list(os.environ):
        if key.startswith('DEPTHLAB_'):
            monkeypatch.delenv(key)


def test_defaults():
    config = Config.load()
    assert config.md == 'TamedExp'
    assert config.md_cap == 1024
    assert config.epsilon == Fraction(1, 2)
    assert config.window == '3:8'
    assert config.machine_variant == 'acc-ctr-3bit'


def test_cli_md_cap_overrides_the_library_default():
    assert MdFunction().cap == 1 << 20
    assert MdFunction.from_name('TamedExp').cap == 1 << 20
    config = Config.load()
    assert MdFunction.from_name(config.md, config.md_cap)(12) == 1024


def test_precedence(tmp_path, monkeypatch):
    settings = tmp_path / 'depthlab.env'
    settings.write_text('MD_CAP=64\nT_MAX=128\nEPSILON=1/3\n')
    monkeypatch.setenv('DEPTHLAB_T_MAX', '512')
    monkeypatch.setenv('DEPTHLAB_UNRELATED', 'ignored')
    config = Config.load(settings, {'md': 'Quadratic', 'log_level': None})
    assert config.md_cap == 64
    assert config.epsilon == Fraction(1, 3)
    assert config.t_max == 512
    assert config.md == 'Quadratic'
    assert Config.load(settings, {'t_max': 2048}).t_max == 2048


def test_unknown_file_setting_is_rejected(tmp_path):
    settings = tmp_path / 'bad.env'
    settings.write_text('COLOUR=blue\n')
    with pytest.raises(ValueError, match='unknown setting'):
        Config.load(settings)


@pytest.mark.parametrize('overrides', [
    {'epsilon': '3/2'},
    {'t_max': 'many'},
    {'calibration': '0'},
    {'machine_variant': 'stack-machine'},
    {'a': '-1'},
])
def test_invalid_values_are_rejected(overrides):
    with pytest.raises(ValueError):
        Config.load(None, overrides)


def test_fingerprint_tracks_settings():
    base = Config()
    assert base.fingerprint() == Config().fingerprint()
    assert base.fingerprint() != Config(md_cap=2048).fingerprint()
    assert base.to_dict()['epsilon'] == '1/2'
