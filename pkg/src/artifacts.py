# -*- coding: utf-8 -*-
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .logger import logger
from .utils import ParameterError

CSV_FORMAT = '%.17g'
text_encoding = 'utf-8'


def format_number(value: float) -> str:
    return CSV_FORMAT % value


def csv_text(header: Sequence[str], rows: np.ndarray) -> str:
    buffer = io.StringIO()
    np.savetxt(buffer, np.atleast_2d(np.asarray(rows, dtype=float)), fmt=CSV_FORMAT, delimiter=',',
               header=','.join(header), comments='', newline='\n')
    return buffer.getvalue()


def json_text(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


@dataclass(frozen=True)
class RunManifest:
    command: str
    arguments: dict[str, Any]
    version: str = __version__
    duration_seconds: float = 0.0
    outputs: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json_text(asdict(self))

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        try:
            payload = json.loads(Path(path).read_text(encoding=text_encoding))
            return cls(**payload)
        except (OSError, json.JSONDecodeError, TypeError) as e:
            raise ParameterError(f"Cannot read run manifest {path}: {e}") from e


class ArtifactSet:
    """Output files staged in memory and written together once a command has succeeded."""

    def __init__(self, stem: str):
        self.stem = stem
        self._files: dict[str, str] = {}

    def add_csv(self, suffix: str, header: Sequence[str], rows: np.ndarray) -> None:
        self._files[f"{self.stem}_{suffix}.csv"] = csv_text(header, rows)

    def add_json(self, suffix: str, payload: dict[str, Any]) -> None:
        self._files[f"{self.stem}_{suffix}.json"] = json_text(payload)

    @property
    def names(self) -> list[str]:
        return list(self._files)

    def commit(self, out_dir: str | Path, manifest: RunManifest) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in self._files.items():
            path = out_dir / name
            with open(path, 'w', encoding=text_encoding, newline='') as f:
                f.write(text)
            written.append(path)
        manifest_path = out_dir / f"{self.stem}.manifest.json"
        with open(manifest_path, 'w', encoding=text_encoding, newline='') as f:
            f.write(manifest.to_json())
        written.append(manifest_path)
        for path in written:
            logger.info(f"Wrote {path}")
        return written
