"""Pytest configuration and fixtures"""

import os
import sys

import pytest

# Set test environment variables before config is imported
os.environ['LOG_LEVEL'] = 'WARNING'
os.environ['VERBOSE_LOGGING'] = 'false'
os.environ['MAX_WORKERS'] = '1'
os.environ['DEFAULT_SEED'] = '20140101'
os.environ['DEFAULT_N_PATHS'] = '20000'

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


@pytest.fixture
def load_spec():
    """Load a shipped spec by id"""
    from utils.validators import resolve_spec
    return resolve_spec


@pytest.fixture
def cauchy_spec(load_spec):
    return load_spec('cauchy')


@pytest.fixture
def stable_spec(load_spec):
    """Isotropic 1-stable in d=1 (shipped as stable_a1_d1)"""
    return load_spec('stable_a1_d1')


@pytest.fixture
def small_cfg():
    """Short Monte Carlo run for unit tests"""
    from models.samples import PathConfig
    return PathConfig(dt=1e-3, max_time=50.0, seed=7, n_paths=4000, refinement=1, block_size=1024)


@pytest.fixture
def output_dir(tmp_path):
    out = tmp_path / "out"
    return str(out)


@pytest.fixture
def spec_text():
    """Valid spec-file text for parser tests"""
    return (
        'id = "parsed"\n'
        'kind = "stable"\n'
        'dimension = 2\n'
        '\n'
        '[parameters]\n'
        'alpha = 1.5\n'
    )
