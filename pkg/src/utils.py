# -*- coding: utf-8 -*-
import configparser
import functools
import traceback
from pathlib import Path
from typing import Any, Callable

from .logger import logger

OptionalPath = str | Path | None

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_BAD_ARGUMENTS = 2
EXIT_NUMERICAL_FAILURE = 3


class BreathingTrapError(Exception):
    pass


class ParameterError(BreathingTrapError, ValueError):
    pass


class NumericalError(BreathingTrapError, ArithmeticError):
    pass


def trace_error_decorator(func: Callable[..., int]) -> Callable[..., int]:
    """Run a CLI command and turn its failure into an exit code."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> int:
        try:
            return func(*args, **kwargs)
        except ParameterError as e:
            logger.error(f"Invalid parameters: {e}")
            return EXIT_BAD_ARGUMENTS
        except NumericalError as e:
            logger.error(f"Numerical failure: {e}")
            return EXIT_NUMERICAL_FAILURE
        except Exception as e:
            error_line = traceback.extract_tb(e.__traceback__)[-1].lineno
            error_info = f"message: type: {type(e).__name__}, {str(e)} in function {func.__name__} at line: {error_line}"
            logger.error(error_info)
            return EXIT_FAILURE

    return wrapper


def read_config_section(file_path: str | Path, section: str) -> dict[str, str]:
    config = configparser.ConfigParser()

    try:
        read_ok = config.read(file_path, encoding='utf-8-sig')
    except configparser.Error as e:
        raise ParameterError(f"Error occurred while reading the configuration file {file_path}: {e}") from e

    if not read_ok:
        raise ParameterError(f"Configuration file {file_path} could not be read.")

    if section not in config:
        logger.warning(f"Section [{section}] does not exist in {file_path}, using defaults.")
        return {}

    return {key.replace('-', '_'): value for key, value in config[section].items()}


def parse_bool(value: str | bool) -> bool:
    if isinstance(value, bool):
        return value
    options = {"yes": True, "true": True, "on": True, "1": True,
               "no": False, "false": False, "off": False, "0": False}
    try:
        return options[str(value).strip().lower()]
    except KeyError:
        raise ParameterError(f"Not a boolean value: {value!r}") from None
