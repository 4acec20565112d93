"""Result tables with lossless CSV and JSON round trips.

Floats are written with 17 significant digits (repr-exact).  Complex columns
become ``name_re``/``name_im`` pairs in CSV and ``[re, im]`` pairs in JSON;
a comment header in the CSV records column kinds so the reader can rebuild
them.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError

SCHEMA = "dislocation-lab/table/1"
KINDS = ("int", "real", "complex")


def _kind(values) -> str:
    if any(isinstance(v, (complex, np.complexfloating)) for v in values):
        return "complex"
    if values and all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in values):
        return "int"
    return "real"


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    provenance: str = ""
    kinds: list[str] | None = None

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise ValidationError("column names must be unique")
        self.rows = [list(r) for r in self.rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValidationError("table rows must all have one entry per column")
        if self.kinds is None:
            self.kinds = [_kind([r[i] for r in self.rows]) for i in range(len(self.columns))]
        if len(self.kinds) != len(self.columns) or any(k not in KINDS for k in self.kinds):
            raise ValidationError("bad column kinds")
        expanded = self.csv_header()
        if len(set(expanded)) != len(expanded):
            raise ValidationError("complex column expansion collides with an existing column name")

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def csv_header(self) -> list[str]:
        out = []
        for name, kind in zip(self.columns, self.kinds):
            out.extend([f"{name}_re", f"{name}_im"] if kind == "complex" else [name])
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultTable):
            return NotImplemented
        return (self.columns == other.columns and self.kinds == other.kinds
                and self.provenance == other.provenance
                and _cells(self) == _cells(other))


def _cells(t: ResultTable):
    def key(v, kind):
        if kind == "complex":
            v = complex(v)
            return (float(v.real).hex(), float(v.imag).hex())
        if kind == "int":
            return int(v)
        return float(v).hex()
    return [[key(v, k) for v, k in zip(r, t.kinds)] for r in t.rows]


def _fmt(x: float) -> str:
    return "%.17g" % x


def emit_table(t: ResultTable, fmt: str, path) -> Path:
    path = Path(path)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            fh.write(f"# provenance: {t.provenance}\n")
            fh.write(f"# kinds: {','.join(t.kinds)}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(t.csv_header())
            for r in t.rows:
                out = []
                for v, kind in zip(r, t.kinds):
                    if kind == "complex":
                        v = complex(v)
                        out.extend([_fmt(v.real), _fmt(v.imag)])
                    elif kind == "int":
                        out.append(str(int(v)))
                    else:
                        out.append(_fmt(float(v)))
                w.writerow(out)
    elif fmt == "json":
        doc = {
            "schema": SCHEMA,
            "provenance": t.provenance,
            "columns": [{"name": n, "kind": k} for n, k in zip(t.columns, t.kinds)],
            "rows": [[_jsonable(v, k) for v, k in zip(r, t.kinds)] for r in t.rows],
        }
        path.write_text(json.dumps(doc, indent=1) + "\n")
    else:
        raise ValidationError(f"unknown table format {fmt!r}")
    return path


def _jsonable(v, kind):
    if kind == "complex":
        v = complex(v)
        return [float(v.real), float(v.imag)]
    return int(v) if kind == "int" else float(v)


def read_table(path) -> ResultTable:
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        if doc.get("schema") != SCHEMA:
            raise ValidationError(f"{path}: not a result table")
        names = [c["name"] for c in doc["columns"]]
        kinds = [c["kind"] for c in doc["columns"]]
        rows = [[complex(*v) if k == "complex" else v for v, k in zip(r, kinds)] for r in doc["rows"]]
        return ResultTable(names, rows, doc["provenance"], kinds)
    with open(path, newline="") as fh:
        prov = fh.readline().rstrip("\n").removeprefix("# provenance: ")
        kinds = fh.readline().rstrip("\n").removeprefix("# kinds: ").split(",")
        kinds = [] if kinds == [""] else kinds
        reader = csv.reader(fh)
        header = next(reader)
        names, i = [], 0
        for k in kinds:
            names.append(header[i][:-3] if k == "complex" else header[i])
            i += 2 if k == "complex" else 1
        rows = []
        for raw in reader:
            row, i = [], 0
            for k in kinds:
                if k == "complex":
                    row.append(complex(float(raw[i]), float(raw[i + 1])))
                    i += 2
                else:
                    row.append(int(raw[i]) if k == "int" else float(raw[i]))
                    i += 1
            rows.append(row)
    return ResultTable(names, rows, prov, kinds)
