#!/usr/bin/env python3
"""
Test if the toolkit can start and initialize without errors
"""

import logging

import pytest

from DGMorse.exceptions import ConfigurationError


def test_imports():
    """Test if all modules can be imported"""
    import DGMorse
    from DGMorse import load_fixture
    from DGMorse.main import COMMANDS, build_parser

    assert DGMorse.__version__
    assert callable(load_fixture)
    assert len(COMMANDS) == 21
    assert build_parser().prog == "dgmorse"


def test_pipeline_initialization():
    """Test if the pipeline can be initialized with each profile"""
    from DGMorse import ProfiledConfig, ToolkitConfig, VerificationPipeline

    for config in (ToolkitConfig(log_level=logging.WARNING), ProfiledConfig.quick(), ProfiledConfig.acceptance()):
        config.log_level = logging.WARNING
        pipeline = VerificationPipeline(config)
        assert hasattr(pipeline, 'run_sweep'), "Missing run_sweep method"
        assert hasattr(pipeline, 'run_tasks'), "Missing run_tasks method"
        assert pipeline.formatter is not None
        assert pipeline.timings == {}


def test_profiles():
    from DGMorse import ProfiledConfig

    quick = ProfiledConfig.quick()
    assert quick.iso_instances == 5
    assert quick.transfer_arity == 5
    acceptance = ProfiledConfig.acceptance()
    assert acceptance.max_arity == 5
    assert acceptance.iso_instances == 200
    assert acceptance.sweep_degrees == tuple(range(-2, 7))
    assert acceptance.sweep_max_dim == 5
    assert quick.sweep_degrees == (0, 1, 2)


def test_config_round_trip_and_update():
    from DGMorse import ToolkitConfig

    config = ToolkitConfig(seed=7, max_k=2)
    copy = ToolkitConfig.from_dict(config.to_dict())
    assert copy.seed == 7
    assert copy.max_k == 2
    copy.update(max_arity=6)
    assert copy.max_arity == 6
    with pytest.raises(AttributeError):
        copy.update(not_a_setting=1)
    with pytest.raises(ValueError):
        copy.update(transfer_arity=1)


def test_invalid_config_fails_at_pipeline_start():
    from DGMorse import ToolkitConfig, VerificationPipeline

    with pytest.raises(ConfigurationError):
        VerificationPipeline(ToolkitConfig(output_format="xml", log_level=logging.WARNING))


def test_worker_count_from_environment(monkeypatch):
    from DGMorse.config import ToolkitConfig

    monkeypatch.setenv("DGMORSE_MAX_WORKERS", "3")
    assert ToolkitConfig().max_workers == 3
    monkeypatch.setenv("DGMORSE_MAX_WORKERS", "many")
    assert ToolkitConfig().max_workers >= 1
