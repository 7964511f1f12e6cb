"""
Unit tests for configuration validation
"""
import importlib
import logging

import pytest

import config


def test_defaults_validate():
    """Shipped defaults pass validate_config"""
    config.validate_config()


def test_grid_defaults_are_consistent():
    """Grid range and size defaults are usable"""
    assert 0 < config.GRID_R_MIN < config.GRID_R_MAX
    assert config.GRID_POINTS >= config.MIN_PROFILE_POINTS


def test_seed_is_never_wall_clock(monkeypatch):
    """DEFAULT_SEED comes from the environment, not the clock"""
    monkeypatch.setenv('DEFAULT_SEED', '12345')
    try:
        assert importlib.reload(config).DEFAULT_SEED == 12345
    finally:
        monkeypatch.undo()
        importlib.reload(config)


def test_invalid_settings_are_collected(monkeypatch):
    """Every problem is reported in one ValueError"""
    monkeypatch.setattr(config, 'GRID_POINTS', 8)
    monkeypatch.setattr(config, 'CONSTANT_HEADROOM', 0.5)
    with pytest.raises(ValueError) as info:
        config.validate_config()
    message = str(info.value)
    assert 'GRID_POINTS' in message
    assert 'CONSTANT_HEADROOM' in message


def test_setup_logging_returns_logger():
    """setup_logging gives a usable logger"""
    logger = config.setup_logging()
    assert isinstance(logger, logging.Logger)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
