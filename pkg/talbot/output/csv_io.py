from __future__ import annotations

import csv
import io
import logging
import os
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

from talbot.physics._common import ConfigurationError, OutputError

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_value(v: Any) -> str:
    """17 значащих цифр, точка как разделитель: float -> str -> float без потерь."""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    if hasattr(v, "item"):  # numpy scalar
        return format_value(v.item())
    return str(v)


def atomic_write(path: PathLike, data: bytes) -> Path:
    """Пишет во временный файл рядом и переименовывает: читатель не увидит полуфайл."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp-{os.getpid()}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as e:
        try:
            tmp.unlink()
        except OSError:
            pass
        raise OutputError(f"cannot write {path}: {e}") from e
    log.info("written %s (%d bytes)", path, len(data))
    return path


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: PathLike) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    width = len(header)
    for i, row in enumerate(rows):
        row = list(row)
        if len(row) != width:
            raise ConfigurationError(f"row {i} has {len(row)} values, header has {width}")
        writer.writerow([format_value(v) for v in row])
    return atomic_write(path, buf.getvalue().encode("utf-8"))


def _parse_cell(s: str) -> Any:
    try:
        return float(s)
    except ValueError:
        return s


def read_csv(path: PathLike) -> tuple[list[str], list[list[Any]]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OutputError(f"cannot read {path}: {e}") from e
    reader = csv.reader(io.StringIO(text))
    header = next(reader, [])
    rows = [[_parse_cell(c) for c in row] for row in reader]
    return header, rows


def write_meta(meta: dict, path: PathLike) -> Path:
    """Сопроводительный текст: строки `key = value`."""
    lines = [f"{k} = {format_value(v)}" for k, v in meta.items()]
    return atomic_write(path, ("\n".join(lines) + "\n").encode("utf-8"))
