"""
Tests :mod:`cfg` module
Description: Config related tests
"""

import pytest

from tarotools.tatra import cfg
from tarotools.tatra import paths
from tarotools.tatra.cfg import LogMode
from tarotools.tatra.common import ConfigFileNotFoundError
from tarotools.tatra.test.testutil import create_test_config, remove_test_config, reset_config


@pytest.fixture(autouse=True)
def remove_config_if_created():
    yield
    remove_test_config()
    reset_config()


def test_defaults():
    create_test_config(dict())
    cfg.load_from_file()
    assert cfg.log_mode == LogMode.PROPAGATE
    assert cfg.log_stdout_level == 'warn'
    assert cfg.log_file_level == 'off'
    assert cfg.log_file_path is None
    assert cfg.max_degree == 300
    assert cfg.all_alpha_max_degree == 100
    assert cfg.alpha_sample_size == 16
    assert cfg.algebraic_search_max_rank == 12


def test_default_config():
    cfg.load_from_file(paths.default_config_file_path())
    assert cfg.log_mode == LogMode.DISABLED
    assert cfg.log_stdout_level == 'warn'
    assert cfg.log_file_level == 'info'
    assert cfg.log_file_path is None
    assert cfg.field_max_order == 65536
    assert cfg.extension_max_points == 90000
    assert cfg.iso_enumeration_max_order == 100000
    assert cfg.loaded_config_path == paths.default_config_file_path()


def test_field_with_underscore():
    create_test_config({"alpha": {"sample_size": 4}, "algebraic_search": {"max_rank": 14}})
    cfg.load_from_file()
    assert cfg.alpha_sample_size == 4
    assert cfg.algebraic_search_max_rank == 14


def test_nested_table():
    create_test_config({"max": {"degree": 1000}, "schurity": {"max_degree": 50}})
    cfg.load_from_file()
    assert cfg.max_degree == 1000
    assert cfg.schurity_max_degree == 50


def test_str_type_error():
    create_test_config({"log": {"stdout": {"level": 3}}})  # Non-str value
    with pytest.raises(TypeError):
        cfg.load_from_file()


def test_bool_type_error():
    create_test_config({"log": {"timing": "hello"}})  # Non-bool value
    with pytest.raises(ValueError):
        cfg.load_from_file()


def test_unknown_attribute():
    create_test_config({"no": {"such": "value"}})
    with pytest.raises(ValueError):
        cfg.load_from_file()


def test_explicit_file_not_found(tmp_path):
    with pytest.raises(ConfigFileNotFoundError):
        cfg.load_from_file(str(tmp_path / 'missing.toml'))


def test_set_variables_converts_strings():
    cfg.set_variables(max_degree='120', log_timing='yes', log_mode='enabled')
    assert cfg.max_degree == 120
    assert cfg.log_timing is True
    assert cfg.log_mode == LogMode.ENABLED


def test_minimal_config():
    cfg.max_degree = 10
    cfg.set_minimal_config()
    assert cfg.log_mode == LogMode.ENABLED
    assert cfg.max_degree == cfg.DEF_MAX_DEGREE
