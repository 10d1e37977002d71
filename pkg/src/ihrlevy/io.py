"""Plain-text file formats.

Matrices are header-less CSV with ``%.12g`` entries.  Edge lists hold one
``i j`` pair per line with 1-based indices and ``i < j``; interaction lists
add a third value column.  Panels are CSV with a header of column names.
"""

import csv
from pathlib import Path

import numpy as np

from .errors import DegenerateColumn, InsufficientData, ParseError
from .graph import Graph

FMT = "%.12g"


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FMT % x
    return str(x)


def write_matrix(path, a):
    np.savetxt(path, np.asarray(a, dtype=float), fmt=FMT, delimiter=",")


def read_matrix(path):
    rows = []
    with open(path, newline="") as fh:
        for ln, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise ParseError(f"non-numeric matrix entry in {path}", ln) from None
            if len(rows[-1]) != len(rows[0]):
                raise ParseError(f"ragged matrix row in {path}", ln)
    a = np.array(rows)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParseError(f"{path} does not hold a square matrix")
    return a


def write_edges(path, graph):
    with open(path, "w") as fh:
        for i, j in graph.sorted_edges():
            fh.write(f"{i + 1} {j + 1}\n")


def _edge_lines(path):
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield ln, line.replace(",", " ").split()


def read_edges(path, d):
    edges = []
    for ln, parts in _edge_lines(path):
        try:
            i, j = int(parts[0]), int(parts[1])
        except (ValueError, IndexError):
            raise ParseError(f"expected 'i j' in {path}", ln) from None
        if not (1 <= i <= d and 1 <= j <= d) or i == j:
            raise ParseError(f"invalid edge ({i}, {j}) for d={d}", ln)
        edges.append((i - 1, j - 1))
    return Graph(d, edges)


def read_psi(path, d):
    """Read ``i j value`` lines into ``({(i, j): value}, graph)`` with 0-based pairs."""
    vals = {}
    for ln, parts in _edge_lines(path):
        try:
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except (ValueError, IndexError):
            raise ParseError(f"expected 'i j value' in {path}", ln) from None
        if not (1 <= i <= d and 1 <= j <= d) or i == j:
            raise ParseError(f"invalid edge ({i}, {j}) for d={d}", ln)
        vals[(min(i, j) - 1, max(i, j) - 1)] = v
    return vals


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def write_panel(path, panel):
    write_rows(path, panel.names, panel.data)


def read_panel_csv(path, min_rows=1, min_cols=1):
    """Read a header + numeric-rows CSV; returns ``(names, data)``."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path} is empty", 1) from None
        names = [h.strip() for h in header]
        rows = []
        for ln, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(names):
                raise ParseError(f"expected {len(names)} fields, found {len(row)}", ln)
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ParseError("non-numeric field", ln) from None
            if not all(np.isfinite(vals)):
                raise ParseError("non-finite value", ln)
            rows.append(vals)
    data = np.array(rows, dtype=float).reshape(len(rows), len(names))
    if data.shape[1] < min_cols:
        raise InsufficientData(f"need at least {min_cols} columns, got {data.shape[1]}")
    if data.shape[0] < min_rows:
        raise InsufficientData(f"need at least {min_rows} rows, got {data.shape[0]}")
    for c in range(data.shape[1]):
        if np.all(data[:, c] == data[0, c]):
            raise DegenerateColumn(f"column {names[c]!r} is constant")
    return names, data
