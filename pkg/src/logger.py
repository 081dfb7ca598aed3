# -*- coding: utf-8 -*-

import sys
from pathlib import Path
from loguru import logger

logger.remove()

custom_format = "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level> - <level>{message}</level>"
file_format = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"

_stderr_sink_id = logger.add(
    sink=sys.stderr,
    format=custom_format,
    level="INFO",
    colorize=True,
)
_file_sink_id: int | None = None


def configure_logging(level: str = "INFO", log_dir: str | Path | None = None) -> None:
    global _stderr_sink_id, _file_sink_id

    logger.remove(_stderr_sink_id)
    _stderr_sink_id = logger.add(
        sink=sys.stderr,
        format=custom_format,
        level=level,
        colorize=True,
    )

    if _file_sink_id is not None:
        logger.remove(_file_sink_id)
        _file_sink_id = None

    if log_dir:
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        _file_sink_id = logger.add(
            f"{log_dir}/breathing_trap.log",
            level="DEBUG",
            format=file_format,
            serialize=False,
            retention=1,
            rotation="300 KB",
            encoding='utf-8'
        )
