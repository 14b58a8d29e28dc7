"""Deterministic CSV/JSON serialization with provenance preambles."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

from . import __version__


@dataclass
class Table:
    columns: List[str]
    rows: List[Sequence[Any]]
    meta: Dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> List[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _fmt(x) -> str:
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        x = x.item()
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else str(x)
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def provenance(meta: Dict[str, Any]) -> Dict[str, Any]:
    return {"package": f"bosonrpa {__version__}", **meta}


def table_to_csv(table: Table) -> str:
    """RFC-4180 body preceded by ``# key: value`` provenance lines."""
    buf = io.StringIO()
    for key, val in provenance(table.meta).items():
        buf.write(f"# {key}: {json.dumps(_jsonable(val), sort_keys=True)}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def table_to_json(table: Table) -> str:
    doc = {
        "meta": provenance(table.meta),
        "columns": table.columns,
        "rows": [list(r) for r in table.rows],
    }
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def read_csv_table(text: str) -> Table:
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition(": ")
            meta[key] = json.loads(val)
        else:
            body.append(line)
    rows = list(csv.reader(body))
    return Table(columns=rows[0], rows=rows[1:], meta=meta)


def report_to_json(report: Dict[str, Any], meta: Dict[str, Any]) -> str:
    doc = {"meta": provenance(meta), "report": report}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
