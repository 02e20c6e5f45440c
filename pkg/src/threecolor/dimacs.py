"""DIMACS .col graph files and "s <vertex> <color>" coloring files.

On disk vertex ids are 1-based; in memory they are 0-based.  Emission is
canonical: the problem line, then edges sorted with u < v.  Parsing a
canonical file and emitting it again is the identity.
"""
from __future__ import annotations

from .graph import Coloring, Graph, GraphError, build_graph


class ParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_dimacs(text: str) -> Graph:
    n = None
    declared_m = None
    edges: list[tuple[int, int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError("duplicate problem line", line_no)
            if len(parts) != 4 or parts[1] != "edge":
                raise ParseError(f"malformed problem line {line!r}", line_no)
            try:
                n = int(parts[2])
                declared_m = int(parts[3])
            except ValueError:
                raise ParseError(f"non-integer counts in {line!r}", line_no) from None
            if n < 0 or declared_m < 0:
                raise ParseError("negative counts", line_no)
        elif parts[0] == "e":
            if n is None:
                raise ParseError("edge before problem line", line_no)
            if len(parts) != 3:
                raise ParseError(f"malformed edge line {line!r}", line_no)
            try:
                u = int(parts[1])
                v = int(parts[2])
            except ValueError:
                raise ParseError(f"non-integer endpoints in {line!r}", line_no) from None
            if not (1 <= u <= n) or not (1 <= v <= n):
                raise ParseError(f"endpoint out of range in {line!r}", line_no)
            edges.append((u - 1, v - 1))
        else:
            raise ParseError(f"unrecognized line {line!r}", line_no)
    if n is None:
        raise ParseError("missing problem line", 0)
    if declared_m != len(edges):
        raise ParseError(f"declared {declared_m} edges, found {len(edges)}", 0)
    try:
        return build_graph(n, edges)
    except GraphError as exc:
        raise ParseError(str(exc), 0) from exc


def emit_dimacs(graph: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append(f"c {part}")
    lines.append(f"p edge {graph.n} {graph.m}")
    for u, v in graph.edges():
        lines.append(f"e {u + 1} {v + 1}")
    return "\n".join(lines) + "\n"


def emit_coloring(coloring: Coloring) -> str:
    lines = [f"s {v + 1} {c}" for v, c in enumerate(coloring.assignment)]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_coloring(text: str, n: int) -> Coloring:
    assign: list[int | None] = [None] * n
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] != "s" or len(parts) != 3:
            raise ParseError(f"unrecognized line {line!r}", line_no)
        try:
            v = int(parts[1])
            color = int(parts[2])
        except ValueError:
            raise ParseError(f"non-integer fields in {line!r}", line_no) from None
        if not 1 <= v <= n:
            raise ParseError(f"vertex {v} out of range", line_no)
        if color < 0:
            raise ParseError(f"negative color {color}", line_no)
        assign[v - 1] = color
    if any(c is None for c in assign):
        missing = next(i for i, c in enumerate(assign) if c is None)
        raise ParseError(f"vertex {missing + 1} has no color", 0)
    palette = max(assign) + 1 if assign else 0
    return Coloring(tuple(assign), palette)
