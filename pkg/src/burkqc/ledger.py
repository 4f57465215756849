"""CSV ledgers and plain-text run manifests.

CSV cells are formatted deterministically (floats by repr) so repeated runs
with the same configuration give byte-identical bodies.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from typing import Dict, Iterable, List, Sequence

import numpy as np


def format_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        return f"{x.real!r}{'+' if x.imag >= 0 or math.isnan(x.imag) else '-'}{abs(x.imag)!r}j"
    if hasattr(x, "value") and hasattr(x, "is_inf"):  # ExtReal
        return "inf" if x.is_inf else repr(float(x.value))
    return str(x)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence], header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(columns)
    for r in rows:
        if len(r) != len(columns):
            raise ValueError(f"row has {len(r)} cells, schema has {len(columns)}")
        w.writerow([format_cell(c) for c in r])
    return buf.getvalue()


def append_rows(path: str, columns: Sequence[str], rows: Iterable[Sequence]):
    """Append to a ledger file, writing the header only when the file is new."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    if not new:
        with open(path) as fh:
            first = fh.readline().rstrip("\n")
        if first != ",".join(columns):
            raise ValueError(f"{path} has a different schema")
    with open(path, "a") as fh:
        fh.write(csv_text(columns, rows, header=new))


def read_rows(text: str) -> List[Dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def parse_cell(s: str):
    """Inverse of format_cell for numbers and booleans; other text is returned as is."""
    if s in ("true", "false"):
        return s == "true"
    for conv in (int, float, complex):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def git_hash(data: bytes) -> str:
    """Git blob id: sha1 over 'blob <len>\\0' + data."""
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(data))
    h.update(data)
    return h.hexdigest()


def manifest_text(record: Dict[str, object]) -> str:
    """key=value lines in insertion order."""
    lines = []
    for k, v in record.items():
        s = format_cell(v)
        if "\n" in s:
            raise ValueError(f"manifest value for {k} spans lines")
        lines.append(f"{k}={s}")
    return "\n".join(lines) + "\n"


def parse_key_values(text: str) -> Dict[str, str]:
    """Parse key=value lines; blank lines and '#' comments are skipped."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        k = k.strip()
        if k in out:
            raise ValueError(f"line {n}: duplicate key {k!r}")
        out[k] = v.strip()
    return out
