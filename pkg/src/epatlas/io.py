"""
Matrix file formats.

JSON::

    {"rows": n, "cols": n, "entries": [[re, im], ...]}   # row-major, n*n pairs

CSV: one line per entry (missing cells are zero), ``i,j,re,im`` with 0-based indices and an
optional header line ``i,j,re,im``; the size is one more than the largest
index unless a leading ``# rows=n cols=n`` comment gives it.  Writers use
``%.17g`` so values round-trip exactly.
"""

import csv
import io
import json
import math
import re
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ParseError

PathLike = Union[str, Path]
FLOAT_FMT = "%.17g"


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}", position=where)
    if not math.isfinite(value):
        raise ParseError(f"{where}: non-finite entry {value!r}", position=where)
    return float(value)


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError("top level: expected an object", position="$")
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise ParseError(f"missing field {key!r}", position=f"$.{key}")
    rows, cols = obj["rows"], obj["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise ParseError("rows and cols must be positive integers", position="$.rows")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise ParseError(f"entries must hold {rows * cols} [re, im] pairs", position="$.entries")
    out = np.empty(rows * cols, dtype=complex)
    for k, pair in enumerate(entries):
        i, j = divmod(k, cols)
        where = f"$.entries[{k}] (cell {i},{j})"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{where}: expected [re, im]", position=where)
        out[k] = complex(_number(pair[0], where), _number(pair[1], where))
    return out.reshape(rows, cols)


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in M.ravel()],
    }


_SIZE = re.compile(r"#\s*rows\s*=\s*(\d+)\s+cols\s*=\s*(\d+)")


def matrix_from_csv(text: str) -> np.ndarray:
    size = None
    cells = {}
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip():
            continue
        first = row[0].strip()
        if first.startswith("#"):
            m = _SIZE.match(",".join(row).strip())
            if m:
                size = (int(m.group(1)), int(m.group(2)))
            continue
        if first == "i":
            continue
        if len(row) != 4:
            raise ParseError(f"line {lineno}: expected 4 fields i,j,re,im, got {len(row)}", position=f"line {lineno}")
        try:
            i, j = int(row[0]), int(row[1])
        except ValueError:
            raise ParseError(f"line {lineno}: indices must be integers", position=f"line {lineno}") from None
        if i < 0 or j < 0:
            raise ParseError(f"line {lineno}: negative index", position=f"line {lineno}")
        vals = []
        for field_no, raw in ((3, row[2]), (4, row[3])):
            try:
                v = float(raw)
            except ValueError:
                raise ParseError(f"line {lineno}, field {field_no}: not a number: {raw!r}",
                                 position=f"line {lineno}, field {field_no}") from None
            if not math.isfinite(v):
                raise ParseError(f"line {lineno}, field {field_no}: non-finite entry at cell ({i},{j})",
                                 position=f"line {lineno}, field {field_no}")
            vals.append(v)
        cells[(i, j)] = complex(*vals)
    if not cells and size is None:
        raise ParseError("no matrix entries found", position="line 1")
    if size is None:
        n = 1 + max(max(i, j) for i, j in cells)
        size = (n, n)
    M = np.zeros(size, dtype=complex)
    for (i, j), z in cells.items():
        if i >= size[0] or j >= size[1]:
            raise ParseError(f"cell ({i},{j}) outside a {size[0]}x{size[1]} matrix", position=f"cell ({i},{j})")
        M[i, j] = z
    return M


def matrix_to_csv(M) -> str:
    M = np.asarray(M, dtype=complex)
    lines = [f"# rows={M.shape[0]} cols={M.shape[1]}", "i,j,re,im"]
    for (i, j), z in np.ndenumerate(M):
        lines.append(f"{i},{j},{FLOAT_FMT % z.real},{FLOAT_FMT % z.imag}")
    return "\n".join(lines) + "\n"


def load_matrix(path: PathLike) -> np.ndarray:
    """Read a square complex matrix from a ``.json`` or ``.csv`` file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", position=str(path)) from None
    if path.suffix.lower() == ".csv":
        M = matrix_from_csv(text)
    else:
        try:
            obj = json.loads(text, parse_constant=lambda c: float(c))
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}",
                             position=f"line {exc.lineno}, column {exc.colno}") from None
        M = matrix_from_json(obj)
    if M.shape[0] != M.shape[1]:
        raise ParseError(f"matrix must be square, got {M.shape[0]}x{M.shape[1]}", position="$")
    return M


def save_matrix(M, path: PathLike) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(matrix_to_csv(M))
    else:
        path.write_text(dumps(matrix_to_json(M)) + "\n")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj) -> str:
    """Deterministic JSON (sorted keys, complex numbers as [re, im])."""
    return json.dumps(_plain(obj), sort_keys=True, allow_nan=False)


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([FLOAT_FMT % v if isinstance(v, float) else v for v in row])
    return buf.getvalue()
