# test_config.py
import logging
from dataclasses import fields

import pytest

from dxd.config import AppConfig, Caps, cap_names, load_caps, load_config
from dxd.errors import ConfigError, ParseError, ResourceCapExceeded
from dxd.log import progress_enabled, setup_logging, verbosity_level


def test_default_caps():
    caps = load_caps(env="")
    assert caps == Caps()
    assert "search_vectors" in cap_names()


def test_env_then_overrides(monkeypatch):
    monkeypatch.setenv("DXD_CAPS", "search_vectors=64,slot_automata=4")
    caps = load_caps(["slot_automata=8"])
    assert caps.search_vectors == 64
    assert caps.slot_automata == 8


@pytest.mark.parametrize("override", ["unknown=1", "search_vectors=many"])
def test_bad_override(override):
    with pytest.raises(ConfigError):
        load_caps([override], env="")


def test_config_checks_kernel_data_mode():
    assert load_config(kernel_data="exact").kernel_data == "exact"
    assert [f.name for f in fields(AppConfig)] == ["caps", "kernel_data", "log_level"]
    with pytest.raises(ConfigError):
        load_config(kernel_data="loose")


def test_error_messages():
    e = ParseError("unexpected ')'", position=3, line=2, source="k.tree")
    assert str(e) == "k.tree:2: unexpected ')' (at column 3)"
    cap = ResourceCapExceeded("slot_automata", 4, "slot 1 has 9 legal automata")
    assert "slot_automata" in str(cap) and cap.limit == 4


@pytest.mark.parametrize("verbose, level", [(0, "WARNING"), (1, "INFO"), (2, "DEBUG"), (5, "DEBUG")])
def test_verbosity_level(verbose, level):
    assert verbosity_level(verbose) == level


def test_setup_logging_attaches_one_handler():
    logger = setup_logging("INFO")
    setup_logging("INFO")
    assert sum(getattr(h, "_dxd", False) for h in logger.handlers) == 1
    assert progress_enabled()
    setup_logging("WARNING")
    assert not progress_enabled()
    assert logger.level == logging.WARNING
