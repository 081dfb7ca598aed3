# -*- coding: utf-8 -*-
import pytest

from src.utils import (
    EXIT_BAD_ARGUMENTS, EXIT_FAILURE, EXIT_NUMERICAL_FAILURE, EXIT_OK, NumericalError, ParameterError, parse_bool,
    read_config_section, trace_error_decorator
)


@trace_error_decorator
def _command(error: Exception | None = None) -> int:
    if error is not None:
        raise error
    return EXIT_OK


@pytest.mark.parametrize("error, code", [
    (None, EXIT_OK),
    (ParameterError("bad"), EXIT_BAD_ARGUMENTS),
    (NumericalError("nan"), EXIT_NUMERICAL_FAILURE),
    (RuntimeError("boom"), EXIT_FAILURE),
])
def test_trace_error_decorator_exit_codes(error, code):
    assert _command(error) == code


def test_error_hierarchy():
    assert issubclass(ParameterError, ValueError)
    assert issubclass(NumericalError, ArithmeticError)


def test_read_config_section(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("[lattice propagate]\nz-end = 12\nsites = 21\n\n[other]\nx = 1\n", encoding="utf-8")
    assert read_config_section(path, "lattice propagate") == {"z_end": "12", "sites": "21"}


def test_read_config_missing_section(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("[other]\nx = 1\n", encoding="utf-8")
    assert read_config_section(path, "well floquet") == {}


def test_read_config_missing_file(tmp_path):
    with pytest.raises(ParameterError):
        read_config_section(tmp_path / "absent.ini", "well floquet")


def test_read_config_malformed_file(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("no section header\n", encoding="utf-8")
    with pytest.raises(ParameterError):
        read_config_section(path, "well floquet")


@pytest.mark.parametrize("value, expected", [("yes", True), ("On", True), ("1", True), (True, True),
                                             ("no", False), (" false ", False), ("0", False)])
def test_parse_bool(value, expected):
    assert parse_bool(value) is expected


def test_parse_bool_rejects_other_text():
    with pytest.raises(ParameterError):
        parse_bool("maybe")
