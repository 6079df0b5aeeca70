"""CSV grid files and JSON coefficient/report files."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .basis import BesselBasis, GridFunction, SpectralField
from .errors import BesselFracError

__all__ = [
    "ParseError",
    "fmt",
    "grid_csv",
    "spacetime_csv",
    "table_csv",
    "read_grid_csv",
    "coeffs_json",
    "read_coeffs_json",
    "dump_json",
    "write_outputs",
]


class ParseError(BesselFracError, ValueError):
    """An input file could not be read."""


def fmt(v: float) -> str:
    # 17 significant digits round-trip any double
    return format(float(v), ".17g")


def table_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([r if isinstance(r, (int, str)) else fmt(r) for r in row])
    return buf.getvalue()


def grid_csv(g: GridFunction) -> str:
    return table_csv(["x", "value"], zip(g.nodes, g.values))


def spacetime_csv(samples: list[tuple[float, GridFunction]]) -> str:
    rows = [(x, t, v) for t, g in samples for x, v in zip(g.nodes, g.values)]
    return table_csv(["x", "t", "value"], rows)


def read_grid_csv(path: str | os.PathLike) -> GridFunction:
    """Read a ``x,value`` CSV file."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"x", "value"} <= set(reader.fieldnames):
                raise ParseError(f"{path}: header must contain columns 'x' and 'value'")
            xs, vs = [], []
            for lineno, row in enumerate(reader, start=2):
                try:
                    xs.append(float(row["x"]))
                    vs.append(float(row["value"]))
                except (TypeError, ValueError):
                    raise ParseError(f"{path}:{lineno}: malformed row {row!r}") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    try:
        return GridFunction(np.array(xs), np.array(vs))
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


def coeffs_json(field: SpectralField, basis: BesselBasis) -> str:
    items = [
        {"k": k + 1, "lambda_k": float(lam), "coeff": float(c)}
        for k, (c, lam) in enumerate(zip(field.coeffs, basis.zeros))
    ]
    return dump_json(items)


def read_coeffs_json(path: str | os.PathLike, basis: BesselBasis) -> SpectralField:
    """Read a coefficient file; shorter expansions are zero-padded to the basis size."""
    try:
        with open(path, encoding="utf-8") as fh:
            items = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(items, list) or not items:
        raise ParseError(f"{path}: expected a non-empty JSON array")
    coeffs = np.zeros(basis.size)
    for pos, item in enumerate(items):
        try:
            k = int(item["k"])
            c = float(item["coeff"])
            lam = float(item["lambda_k"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"{path}: entry {pos} lacks k/lambda_k/coeff") from None
        if k != pos + 1:
            raise ParseError(f"{path}: entry {pos} has k={k}, expected {pos + 1}")
        if k > basis.size:
            break
        if abs(lam - basis.zeros[k - 1]) > 1e-9 * lam:
            raise ParseError(f"{path}: lambda_{k}={lam!r} does not match the basis")
        coeffs[k - 1] = c
    return SpectralField(coeffs)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_outputs(out_dir: str | os.PathLike, files: dict[str, str]) -> list[Path]:
    """Write every file atomically into ``out_dir``; nothing is written outside it."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in files.items():
        if Path(name).name != name:
            raise ValueError(f"output name {name!r} must be a bare file name")
        fd, tmp = tempfile.mkstemp(dir=out, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, out / name)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        written.append(out / name)
    return written
