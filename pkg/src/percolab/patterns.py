"""Named pattern graphs and pattern/graph loading for the command line."""

from __future__ import annotations

import re
from pathlib import Path

from .errors import ParseError
from .graph import Graph, complete_graph, parse_edge_list, parse_graph6

BUILTIN_HELP = "K2..K8, C3..C12, K_{a,b}, paw, path_k (k vertices), star_k (K_{1,k})"


def cycle(m: int) -> Graph:
    if m < 3:
        raise ParseError("cycles need at least 3 vertices")
    return Graph(range(m), [(i, (i + 1) % m) for i in range(m)])


def path(k: int) -> Graph:
    return Graph(range(k), [(i, i + 1) for i in range(k - 1)])


def star(k: int) -> Graph:
    return Graph(range(k + 1), [(0, i) for i in range(1, k + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(range(a + b), [(i, a + j) for i in range(a) for j in range(b)])


def paw() -> Graph:
    """Triangle ``0 1 2`` with pendant edge ``2 3``."""
    return Graph(range(4), [(0, 1), (0, 2), (1, 2), (2, 3)])


_RULES = [
    (re.compile(r"^K_?\{?(\d+),(\d+)\}?$"), lambda m: complete_bipartite(int(m[1]), int(m[2]))),
    (re.compile(r"^K_?(\d+)$"), lambda m: complete_graph(int(m[1]))),
    (re.compile(r"^C_?(\d+)$"), lambda m: cycle(int(m[1]))),
    (re.compile(r"^path_?(\d+)$"), lambda m: path(int(m[1]))),
    (re.compile(r"^star_?(\d+)$"), lambda m: star(int(m[1]))),
    (re.compile(r"^paw$"), lambda m: paw()),
]


def builtin(name: str) -> Graph | None:
    for rx, make in _RULES:
        m = rx.match(name.strip())
        if m:
            return make(m)
    return None


def read_graph_file(path: str | Path, fmt: str | None = None) -> Graph:
    p = Path(path)
    text = p.read_text()
    if fmt is None:
        fmt = "graph6" if p.suffix in (".g6", ".graph6") else "edge-list"
    if fmt == "graph6":
        return parse_graph6(text.strip())
    return parse_edge_list(text)


def load_graph(spec: str, fmt: str | None = None) -> Graph:
    """A builtin name, a file (graph6 by ``.g6`` suffix, otherwise edge list)
    or an inline graph6 string."""
    g = builtin(spec)
    if g is not None:
        return g
    p = Path(spec)
    if p.exists():
        return read_graph_file(p, fmt)
    if fmt in (None, "graph6"):
        try:
            return parse_graph6(spec)
        except ParseError:
            pass
    raise ParseError(f"{spec!r} is neither a builtin pattern ({BUILTIN_HELP}), a file, nor graph6")
