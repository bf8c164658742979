"""Immutable simple graphs, graph6 / edge-list I/O and exact density values.

Vertices are non-negative integers.  A graph carries its own vertex set, so a
subgraph of ``F`` is just another :class:`Graph` whose vertices and edges are
subsets of ``F``'s.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .errors import ParseError, ValidationError

Edge = tuple[int, int]
Embedding = dict[int, int]
Rational = Fraction


def edge(u: int, v: int) -> Edge:
    """Normalized unordered pair ``(min, max)``."""
    if u == v:
        raise ValidationError(f"loop at vertex {u}")
    return (u, v) if u < v else (v, u)


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


class Graph:
    """Undirected simple graph on an explicit vertex set.

    Instances are immutable and hashable.  ``masks`` exposes the adjacency as
    one integer bit-row per vertex, indexed by vertex position in
    ``vertices``.
    """

    __slots__ = ("_verts", "_adj", "_m", "labels", "_masks", "_index", "_hash")

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Iterable[tuple[int, int]] = (),
        labels: Mapping[int, str] | None = None,
    ) -> None:
        verts = tuple(sorted(set(vertices)))
        if verts and verts[0] < 0:
            raise ValidationError("vertex ids must be non-negative")
        adj: dict[int, set[int]] = {v: set() for v in verts}
        m = 0
        for u, v in edges:
            a, b = edge(u, v)
            if a not in adj or b not in adj:
                raise ValidationError(f"edge {a}-{b} uses a vertex outside the vertex set")
            if b in adj[a]:
                raise ValidationError(f"duplicate edge {a}-{b}")
            adj[a].add(b)
            adj[b].add(a)
            m += 1
        self._set(verts, {v: frozenset(s) for v, s in adj.items()}, m)
        self.labels = dict(labels) if labels else None

    def _set(self, verts, adj, m):
        self._verts = verts
        self._adj = adj
        self._m = m
        self._masks = None
        self._index = None
        self._hash = None

    @classmethod
    def _raw(cls, verts: tuple[int, ...], adj: dict[int, frozenset[int]], m: int | None = None) -> Graph:
        g = cls.__new__(cls)
        if m is None:
            m = sum(len(s) for s in adj.values()) // 2
        g._set(verts, adj, m)
        g.labels = None
        return g

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n: int | None = None) -> Graph:
        """Graph on ``range(n)``; ``n`` defaults to one past the largest endpoint."""
        edges = list(edges)
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        return cls(range(n), edges)

    @classmethod
    def from_adjacency_rows(cls, rows: Iterable[Iterable[int]]) -> Graph:
        """Trusted constructor from symmetric neighbor lists on ``range(len(rows))``."""
        adj = {i: frozenset(int(x) for x in r) for i, r in enumerate(rows)}
        return cls._raw(tuple(range(len(adj))), adj)

    # basic queries ------------------------------------------------------
    @property
    def vertices(self) -> tuple[int, ...]:
        return self._verts

    @property
    def n(self) -> int:
        return len(self._verts)

    @property
    def m(self) -> int:
        return self._m

    def v(self) -> int:
        return len(self._verts)

    def e(self) -> int:
        return self._m

    def neighbors(self, u: int) -> frozenset[int]:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def has_vertex(self, u: int) -> bool:
        return u in self._adj

    def has_edge(self, u: int, v: int) -> bool:
        s = self._adj.get(u)
        return s is not None and v in s

    def edges(self) -> list[Edge]:
        out = [(u, v) for u in self._verts for v in self._adj[u] if u < v]
        out.sort()
        return out

    def iter_edges(self) -> Iterator[Edge]:
        for u in self._verts:
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.iter_edges())

    def min_degree(self) -> int:
        return min((len(s) for s in self._adj.values()), default=0)

    def isolated_vertices(self) -> list[int]:
        return [u for u in self._verts if not self._adj[u]]

    @property
    def index(self) -> dict[int, int]:
        """Vertex id to bit position."""
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self._verts)}
        return self._index

    @property
    def masks(self) -> tuple[int, ...]:
        if self._masks is None:
            idx = self.index
            rows = []
            for v in self._verts:
                r = 0
                for w in self._adj[v]:
                    r |= 1 << idx[w]
                rows.append(r)
            self._masks = tuple(rows)
        return self._masks

    # derived graphs -----------------------------------------------------
    def induced(self, vertices: Iterable[int]) -> Graph:
        keep = frozenset(vertices)
        missing = keep - self._adj.keys()
        if missing:
            raise ValidationError(f"vertices {sorted(missing)} not in graph")
        adj = {v: self._adj[v] & keep for v in sorted(keep)}
        return Graph._raw(tuple(sorted(keep)), adj)

    def with_edges(self, edges: Iterable[tuple[int, int]], extra_vertices: Iterable[int] = ()) -> Graph:
        """Copy with edges (and their endpoints) added; duplicates are ignored."""
        adj = {v: set(s) for v, s in self._adj.items()}
        for x in extra_vertices:
            adj.setdefault(x, set())
        for u, v in edges:
            a, b = edge(u, v)
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        return Graph._raw(tuple(sorted(adj)), {v: frozenset(s) for v, s in adj.items()})

    def without_edges(self, edges: Iterable[tuple[int, int]]) -> Graph:
        adj = {v: set(s) for v, s in self._adj.items()}
        for u, v in edges:
            adj[u].discard(v)
            adj[v].discard(u)
        return Graph._raw(self._verts, {v: frozenset(s) for v, s in adj.items()})

    def union(self, other: Graph) -> Graph:
        return self.with_edges(other.iter_edges(), other.vertices)

    def relabel(self, mapping: Mapping[int, int]) -> Graph:
        """Image under an injective vertex map."""
        return Graph((mapping[v] for v in self._verts), ((mapping[u], mapping[v]) for u, v in self.iter_edges()))

    def canonical(self) -> Graph:
        """Relabel vertices to ``range(n)`` preserving order."""
        if self._verts == tuple(range(len(self._verts))):
            return self
        return self.relabel({v: i for i, v in enumerate(self._verts)})

    def is_subgraph_of(self, other: Graph) -> bool:
        if not set(self._verts) <= other._adj.keys():
            return False
        return all(v in other._adj[u] for u, v in self.iter_edges())

    def is_complete(self) -> bool:
        k = len(self._verts)
        return self._m == k * (k - 1) // 2

    def is_connected(self) -> bool:
        if len(self._verts) <= 1:
            return True
        start = self._verts[0]
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self._verts)

    def components(self) -> list[list[int]]:
        seen: set[int] = set()
        comps = []
        for s in self._verts:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            i = 0
            while i < len(comp):
                for w in self._adj[comp[i]]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                i += 1
            comps.append(sorted(comp))
        return comps

    def cyclomatic_number(self) -> int:
        return self._m - len(self._verts) + len(self.components())

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(self._verts)
        g.add_edges_from(self.iter_edges())
        return g

    # dunder -------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._verts == other._verts and self._m == other._m and self._adj == other._adj

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._verts, self.edge_set()))
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(v={self.n}, e={self.m}, edges={self.edges()})"


@dataclass(frozen=True)
class RootedPair:
    """``S`` inside ``F`` together with an ordering of ``V(S)``."""

    S: Graph
    F: Graph
    order: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.S.is_subgraph_of(self.F):
            raise ValidationError("S is not a subgraph of F")
        if not self.order:
            object.__setattr__(self, "order", self.S.vertices)
        elif sorted(self.order) != list(self.S.vertices):
            raise ValidationError("order must be a permutation of V(S)")


def complete_graph(n: int) -> Graph:
    if n < 0:
        raise ValidationError("n must be non-negative")
    return Graph(range(n), combinations(range(n), 2))


def empty_graph(vertices: int | Iterable[int]) -> Graph:
    return Graph(range(vertices) if isinstance(vertices, int) else vertices)


def edge_graph(e: tuple[int, int]) -> Graph:
    """The single edge ``e`` as a two-vertex graph."""
    return Graph(e, [e])


def image_edges(mapping: Mapping[int, int], pattern: Graph) -> list[Edge]:
    return [edge(mapping[u], mapping[v]) for u, v in pattern.iter_edges()]


# ---------------------------------------------------------------------------
# text formats


def _graph6_size(data: bytes, pos: int) -> tuple[int, int]:
    if pos >= len(data):
        raise ParseError("graph6: empty input")
    if data[pos] != 126:
        return data[pos] - 63, pos + 1
    if pos + 1 < len(data) and data[pos + 1] == 126:
        chunk, width = data[pos + 2 : pos + 8], 6
        pos += 8
    else:
        chunk, width = data[pos + 1 : pos + 4], 3
        pos += 4
    if len(chunk) != width:
        raise ParseError("graph6: truncated size field")
    n = 0
    for c in chunk:
        if not 63 <= c <= 126:
            raise ParseError(f"graph6: invalid byte {c!r} in size field")
        n = (n << 6) | (c - 63)
    return n, pos


def parse_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<") :]
    data = s.encode("ascii", errors="replace")
    n, pos = _graph6_size(data, 0)
    nbits = n * (n - 1) // 2
    body = data[pos:]
    if len(body) != (nbits + 5) // 6:
        raise ParseError(f"graph6: expected {(nbits + 5) // 6} data bytes for n={n}, got {len(body)}")
    bits = 0
    for off, c in enumerate(body):
        if not 63 <= c <= 126:
            raise ParseError(f"graph6: invalid byte at offset {pos + off}")
        bits = (bits << 6) | (c - 63)
    total = 6 * len(body)
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if (bits >> (total - 1 - k)) & 1:
                edges.append((i, j))
            k += 1
    if total > nbits and bits & ((1 << (total - nbits)) - 1):
        raise ParseError("graph6: nonzero padding bits")
    return Graph(range(n), edges)


def to_graph6(g: Graph) -> str:
    """graph6 encoding; vertices are taken in sorted order."""
    g = g.canonical()
    n = g.n
    if n <= 62:
        out = [n + 63]
    elif n <= 258047:
        out = [126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)]
    else:
        out = [126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)]
    bits = []
    for j in range(1, n):
        nb = g.neighbors(j)
        bits.extend(1 if i in nb else 0 for i in range(j))
    bits.extend([0] * (-len(bits) % 6))
    for k in range(0, len(bits), 6):
        x = 0
        for b in bits[k : k + 6]:
            x = (x << 1) | b
        out.append(x + 63)
    return bytes(out).decode("ascii")


def parse_edge_list(text: str, n: int | None = None) -> Graph:
    """One ``u v`` pair per line; ``#`` starts a comment; ``# n=K`` fixes the vertex count."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("#")
        comment = comment.strip().replace(" ", "")
        if comment.startswith("n=") and n is None:
            try:
                n = int(comment[2:])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad vertex-count header") from exc
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: vertex ids must be integers") from exc
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: vertex ids must be non-negative")
        if u == v:
            raise ValidationError(f"line {lineno}: loop at vertex {u}")
        edges.append((u, v))
    top = 1 + max((max(e) for e in edges), default=-1)
    if n is not None and n < top:
        raise ValidationError(f"header n={n} but vertex {top - 1} used")
    return Graph(range(n if n is not None else top), edges)


def to_edge_list(g: Graph) -> str:
    g = g.canonical()
    lines = [f"# n={g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str, format: str = "edge-list") -> Graph:
    if format == "graph6":
        return parse_graph6(text)
    if format in ("edge-list", "edgelist"):
        return parse_edge_list(text)
    raise ParseError(f"unknown graph format {format!r}")
