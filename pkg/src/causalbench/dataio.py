"""Deterministic readers and writers for datasets, graphs, and the
stats/std/config result tables the comparison viewer consumes.

All writers are pure functions of their inputs, so identical inputs produce
byte-identical files. Numbers are printed with 10 significant digits (shortest
form); the sentinels '*' (undefined, division by zero) and '-' (missing, e.g.
timeout) pass through verbatim.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .graph import ARROW, TAIL, MixedGraph
from .simulate import DataSet

STATS_COLUMNS = ["Alg", "Vars", "Deg", "N", "AP", "AR", "AHP", "AHR", "McAdj", "McArrow", "E"]
STAT_NAMES = STATS_COLUMNS[4:]
UNDEFINED = "*"
MISSING = "-"

_EDGE_TOKENS = {
    (TAIL, ARROW): "-->",
    (TAIL, TAIL): "---",
    (ARROW, ARROW): "<->",
}
_TOKEN_MARKS = {v: k for k, v in _EDGE_TOKENS.items()}


class FormatError(ValueError):
    """Malformed file; the message names the offending line."""


def _fmt(x: float) -> str:
    return format(float(x), ".10g")


# -- datasets ----------------------------------------------------------------


def write_dataset(data: DataSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(data.names) + "\n")
        for row in data.values:
            fh.write("\t".join(_fmt(x) for x in row) + "\n")


def read_dataset(path: str) -> DataSet:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header:
            raise FormatError(f"{path}:1: empty header line")
        names = header.split("\t")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(names):
                raise FormatError(
                    f"{path}:{lineno}: expected {len(names)} columns, got {len(parts)}"
                )
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric value") from None
    return DataSet(names=names, values=np.array(rows, dtype=float))


# -- graphs --------------------------------------------------------------------


def write_graph(g: MixedGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("Graph Nodes:\n")
        fh.write(";".join(g.names) + "\n")
        fh.write("Graph Edges:\n")
        k = 0
        for i, j, mi, mj in g.edges():
            a, b, ma, mb = i, j, mi, mj
            if (ma, mb) not in _EDGE_TOKENS:  # ARROW-TAIL: write reversed
                a, b, ma, mb = j, i, mj, mi
            k += 1
            fh.write(f"{k}. {g.names[a]} {_EDGE_TOKENS[(ma, mb)]} {g.names[b]}\n")


def read_graph(path: str) -> MixedGraph:
    """Parse the graph text format; fall back to a generic 'A -> B' edge list
    when the Nodes header is absent."""
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    stripped = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip()]
    if not stripped:
        raise FormatError(f"{path}: empty graph file")
    if stripped[0][1] != "Graph Nodes:":
        return _read_edge_list(path, stripped)

    if len(stripped) < 2:
        raise FormatError(f"{path}: missing node list")
    names = [n for n in stripped[1][1].split(";") if n]
    g = MixedGraph(names)
    rest = stripped[2:]
    if not rest or rest[0][1] != "Graph Edges:":
        raise FormatError(f"{path}: missing 'Graph Edges:' section")
    for lineno, line in rest[1:]:
        body = line.split(". ", 1)
        if len(body) != 2:
            raise FormatError(f"{path}:{lineno}: malformed edge line {line!r}")
        parts = body[1].split()
        if len(parts) != 3:
            raise FormatError(f"{path}:{lineno}: malformed edge line {line!r}")
        a_name, token, b_name = parts
        if token not in _TOKEN_MARKS:
            raise FormatError(f"{path}:{lineno}: unknown edge token {token!r}")
        try:
            a, b = g.node_index(a_name), g.node_index(b_name)
        except KeyError as exc:
            raise FormatError(f"{path}:{lineno}: undeclared node {exc}") from None
        ma, mb = _TOKEN_MARKS[token]
        g.add_edge(a, b, ma, mb)
    return g


def _read_edge_list(path: str, stripped) -> MixedGraph:
    """Generic fallback: one 'A -> B' directed edge per line."""
    names: list[str] = []
    seen: dict[str, int] = {}
    edges = []
    for lineno, line in stripped:
        parts = line.split()
        if len(parts) != 3 or parts[1] != "->":
            raise FormatError(f"{path}:{lineno}: expected 'A -> B', got {line!r}")
        for name in (parts[0], parts[2]):
            if name not in seen:
                seen[name] = len(names)
                names.append(name)
        edges.append((seen[parts[0]], seen[parts[2]]))
    g = MixedGraph(names)
    for a, b in edges:
        g.add_directed(a, b)
    return g


# -- result tables --------------------------------------------------------------


@dataclass
class StatsTable:
    """Rectangular stats table keyed by (Alg, Vars, Deg, N)."""

    rows: list[dict] = field(default_factory=list)
    header: list[str] = field(default_factory=lambda: list(STATS_COLUMNS))

    def __post_init__(self):
        if self.header != STATS_COLUMNS:
            raise ValueError(f"header must be {STATS_COLUMNS}")
        keys = [(r["Alg"], r["Vars"], r["Deg"], r["N"]) for r in self.rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (Alg, Vars, Deg, N) key")

    def add(self, alg_id: int, vars: int, deg: int, n: int, stats: dict) -> None:
        row = {"Alg": alg_id, "Vars": vars, "Deg": deg, "N": n}
        for name in STAT_NAMES:
            value = stats.get(name, MISSING)
            if value is None:
                value = UNDEFINED
            row[name] = value
        self.rows.append(row)

    def sort(self) -> None:
        self.rows.sort(key=lambda r: (r["Alg"], r["Vars"], r["Deg"], r["N"]))

    def lookup(self, alg_id: int, vars: int, deg: int, n: int) -> dict | None:
        for r in self.rows:
            if (r["Alg"], r["Vars"], r["Deg"], r["N"]) == (alg_id, vars, deg, n):
                return r
        return None


@dataclass
class ConfigManifest:
    """Algorithm labels/parameters, factor levels, and the run count."""

    algorithms: list[tuple[int, str, dict[str, str]]]
    vars_levels: list[int]
    deg_levels: list[int]
    n_levels: list[int]
    runs: int


def _format_cell(value) -> str:
    if isinstance(value, str):
        if value not in (UNDEFINED, MISSING):
            raise ValueError(f"unexpected cell string {value!r}")
        return value
    if isinstance(value, (int, np.integer)) or (
        isinstance(value, float) and value.is_integer() and abs(value) < 1e15
    ):
        return str(int(value))
    return _fmt(value)


def write_stats_table(table: StatsTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(table.header) + "\n")
        for row in table.rows:
            fh.write("\t".join(_format_cell(row[c]) for c in table.header) + "\n")


def read_stats_table(path: str) -> StatsTable:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header != STATS_COLUMNS:
            raise FormatError(f"{path}:1: bad header {header!r}")
        table = StatsTable()
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(STATS_COLUMNS):
                raise FormatError(f"{path}:{lineno}: wrong column count")
            row = {}
            for col, cell in zip(STATS_COLUMNS, parts):
                if col in ("Alg", "Vars", "Deg", "N"):
                    row[col] = int(cell)
                elif cell in (UNDEFINED, MISSING):
                    row[col] = cell
                else:
                    row[col] = float(cell)
            table.rows.append(row)
    return StatsTable(rows=table.rows)  # re-validate keys


def write_config(manifest: ConfigManifest, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"runs\t{manifest.runs}\n")
        fh.write("vars\t" + ",".join(str(v) for v in manifest.vars_levels) + "\n")
        fh.write("deg\t" + ",".join(str(v) for v in manifest.deg_levels) + "\n")
        fh.write("n\t" + ",".join(str(v) for v in manifest.n_levels) + "\n")
        for alg_id, name, params in manifest.algorithms:
            cells = [f"{k}={v}" for k, v in sorted(params.items())]
            fh.write("\t".join(["alg", str(alg_id), name] + cells) + "\n")


def read_config(path: str) -> ConfigManifest:
    runs = 0
    vars_levels: list[int] = []
    deg_levels: list[int] = []
    n_levels: list[int] = []
    algorithms = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            kind = parts[0]
            try:
                if kind == "runs":
                    runs = int(parts[1])
                elif kind in ("vars", "deg", "n"):
                    levels = [int(x) for x in parts[1].split(",") if x]
                    {"vars": vars_levels, "deg": deg_levels, "n": n_levels}[
                        kind
                    ].extend(levels)
                elif kind == "alg":
                    params = dict(cell.split("=", 1) for cell in parts[3:])
                    algorithms.append((int(parts[1]), parts[2], params))
                else:
                    raise FormatError(f"{path}:{lineno}: unknown record {kind!r}")
            except (IndexError, ValueError) as exc:
                if isinstance(exc, FormatError):
                    raise
                raise FormatError(f"{path}:{lineno}: malformed record") from None
    return ConfigManifest(algorithms, vars_levels, deg_levels, n_levels, runs)


def write_tables(
    means: StatsTable, stds: StatsTable, manifest: ConfigManifest, outdir: str
) -> dict[str, str]:
    """Emit stats.txt, std.txt, and config.txt; returns the written paths."""
    if len(means.rows) != len(stds.rows):
        raise ValueError("means and stds tables must have matching shapes")
    for m, s in zip(means.rows, stds.rows):
        if [(m[c]) for c in ("Alg", "Vars", "Deg", "N")] != [
            (s[c]) for c in ("Alg", "Vars", "Deg", "N")
        ]:
            raise ValueError("means and stds tables must share row keys")
    os.makedirs(outdir, exist_ok=True)
    paths = {
        "stats": os.path.join(outdir, "stats.txt"),
        "std": os.path.join(outdir, "std.txt"),
        "config": os.path.join(outdir, "config.txt"),
    }
    write_stats_table(means, paths["stats"])
    write_stats_table(stds, paths["std"])
    write_config(manifest, paths["config"])
    return paths
