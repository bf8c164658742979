"""Dense/sparse rooted pairs, alpha-cores, ladders and certified bounds on rho(H).

For an edge ``e`` and a graph ``F`` on ``V(e) ∪ X`` write
``g(X) = b*e(F[V(e) ∪ X]) - a*|X|`` where ``alpha = a/b``.  Then ``(e, F)``
is alpha-dense exactly when ``g`` at the full set is at least ``g`` at every
proper subset, and the rooted density of ``F`` over ``S`` stays below
``alpha`` exactly when ``g`` (rooted at ``S``) never exceeds its value at
the empty set.  Both reduce to array operations over all subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count

import numpy as np

from .density import (
    MAX_FREE_VERTICES,
    Balance,
    _lex_first,
    beta,
    is_balanced,
    lam,
    rho_max,
    strip_isolated,
    subset_edge_counts,
    subset_sizes,
)
from .dynamics import WGA, closure
from .embed import automorphisms
from .errors import (
    ConstructionError,
    NoCertificateError,
    PreconditionError,
    SizeError,
    ValidationError,
)
from .graph import Edge, Graph, edge, edge_graph, format_rational

INFINITY = math.inf


def _rooted_arrays(root: tuple[int, ...], F: Graph):
    """Free vertices of ``F`` outside ``root`` and ``e(F[root ∪ X])`` for every ``X``."""
    rs = set(root)
    free = [v for v in F.vertices if v not in rs]
    if len(free) > MAX_FREE_VERTICES:
        raise SizeError(f"{len(free)} free vertices exceeds the cap of {MAX_FREE_VERTICES}")
    pos = {v: i for i, v in enumerate(free)}
    masks, weights = [], []
    for v in free:
        m = w = 0
        for u in F.neighbors(v):
            if u in pos:
                m |= 1 << pos[u]
            elif u in rs:
                w += 1
        masks.append(m)
        weights.append(w)
    inside = sum(1 for u, v in F.iter_edges() if u in rs and v in rs)
    counts = subset_edge_counts(masks, weights).astype(np.int64) + inside
    return free, counts


def _gain(counts: np.ndarray, sizes: np.ndarray, alpha: Fraction) -> np.ndarray:
    return counts * alpha.denominator - sizes.astype(np.int64) * alpha.numerator


def _pick(cands: np.ndarray, sizes: np.ndarray, r: int) -> int:
    k = sizes[cands].min()
    return _lex_first(cands[sizes[cands] == k], r)


def _members(free: list[int], x: int) -> list[int]:
    return [free[i] for i in range(len(free)) if x >> i & 1]


def is_alpha_dense(e: tuple[int, int], F: Graph, alpha: Fraction) -> tuple[bool, Graph | None]:
    """Whether every induced ``F'`` with ``V(e) ⊆ V(F') ⊊ V(F)`` satisfies
    ``e(F) - e(F') >= alpha (v(F) - v(F'))``; returns the first violator
    (fewest vertices, then lexicographic) otherwise."""
    e = edge(*e)
    if not all(F.has_vertex(x) for x in e):
        raise ValidationError("V(e) must lie in V(F)")
    alpha = Fraction(alpha)
    free, counts = _rooted_arrays(e, F)
    sizes = subset_sizes(len(free))
    g = _gain(counts, sizes, alpha)
    full = g[-1]
    bad = np.flatnonzero(g[:-1] > full)
    if bad.size == 0:
        return True, None
    x = _pick(bad, sizes, len(free))
    return False, F.induced(list(e) + _members(free, x))


def is_alpha_sparse(S: Graph, F: Graph, alpha: Fraction) -> tuple[bool, Graph | None]:
    """Whether ``rho_max(S, F) < alpha``; otherwise the maximizing subgraph."""
    if not S.is_subgraph_of(F):
        from .errors import ContainmentError

        raise ContainmentError("S is not a subgraph of F")
    if F.n == S.n:
        return True, None
    value, verts = rho_max(S, F)
    if value < Fraction(alpha):
        return True, None
    return False, F.induced(verts)


@dataclass
class CoreResult:
    """The alpha-core ``C_e`` of ``(e, A)``.

    ``certificate`` is the maximal ``F`` with ``(e, F)`` alpha-dense (``None``
    when only ``F = e`` qualifies, in which case ``core`` is edgeless on
    ``V(e)``).
    """

    e: Edge
    core: Graph
    dense_pair_ok: bool
    certificate: Graph | None
    alpha: Fraction

    def to_json(self) -> dict:
        return {
            "e": list(self.e),
            "alpha": format_rational(self.alpha),
            "core_vertices": list(self.core.vertices),
            "core_edges": [list(x) for x in self.core.edges()],
            "v_core": self.core.n,
            "dense_pair_ok": self.dense_pair_ok,
        }


def dense_vertex_sets(e: Edge, F: Graph, alpha: Fraction) -> tuple[list[int], np.ndarray]:
    """Bitmasks ``X`` (over the returned free-vertex list) with ``X`` nonempty and
    ``(e, F[V(e) ∪ X])`` alpha-dense."""
    free, counts = _rooted_arrays(e, F)
    r = len(free)
    sizes = subset_sizes(r)
    g = _gain(counts, sizes, Fraction(alpha))
    # best[X] = max over subsets of X (inclusive), proper[X] = max over proper subsets
    best = g.copy()
    for i in range(r):
        v = best.reshape(-1, 2, 1 << i)
        np.maximum(v[:, 1, :], v[:, 0, :], out=v[:, 1, :])
    proper = np.full_like(g, np.iinfo(np.int64).min)
    for i in range(r):
        p = proper.reshape(-1, 2, 1 << i)
        b = best.reshape(-1, 2, 1 << i)
        np.maximum(p[:, 1, :], b[:, 0, :], out=p[:, 1, :])
    dense = np.flatnonzero(g >= proper)
    return free, dense[dense > 0]


def alpha_core(e: tuple[int, int], A: Graph, alpha: Fraction) -> CoreResult:
    """The unique maximal ``F`` with ``e ⊂ F ⊆ A ∪ e`` and ``(e, F)`` alpha-dense, minus ``e``."""
    e = edge(*e)
    alpha = Fraction(alpha)
    Ae = A.with_edges([e])
    free, dense = dense_vertex_sets(e, Ae, alpha)
    if dense.size == 0:
        return CoreResult(e, Graph(e), True, None, alpha)
    union = int(np.bitwise_or.reduce(dense))
    F = Ae.induced(list(e) + _members(free, union))
    ok, _ = is_alpha_dense(e, F, alpha)
    return CoreResult(e, F.without_edges([e]), ok, F, alpha)


def black_red_cores(wga: WGA, alpha: Fraction, edges=None) -> dict[Edge, Graph]:
    """``C_g``: ``g`` itself for black edges, the alpha-core of ``(g, W_g)`` for red ones."""
    out: dict[Edge, Graph] = {}
    todo = edges if edges is not None else list(wga.round)
    for g in todo:
        if wga.is_black(g):
            out[g] = edge_graph(g)
        else:
            out[g] = alpha_core(g, wga.W(g), alpha).core
    return out


def modified_core(f: tuple[int, int], wga: WGA, alpha: Fraction, cores: dict[Edge, Graph] | None = None) -> Graph:
    """Union of ``C_g`` over the edges ``g`` of ``H_f - f``."""
    f = edge(*f)
    if f not in wga.round:
        from .errors import NotActivatedError

        raise NotActivatedError(f"edge {f} is not in the closure")
    if wga.is_black(f):
        raise PreconditionError(f"edge {f} is initially active and has no modified core")
    gs = wga.completing_edges(f)
    if cores is None:
        cores = {}
    for g in gs:
        if g not in cores:
            cores.update(black_red_cores(wga, alpha, [g]))
    M = Graph(())
    for g in gs:
        M = M.union(cores[g])
    return M


# ---------------------------------------------------------------------------
# activating pairs and certificates


@dataclass
class RhoCertificate:
    """An activating pair ``(e, A)`` and its value ``rho_max(e, A ∪ e) >= rho(H)``."""

    e: Edge
    A: Graph
    bound: Fraction
    provenance: str
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "e": list(self.e),
            "v": self.A.n,
            "A": [list(x) for x in self.A.edges()],
            "A_vertices": list(self.A.vertices),
            "bound": format_rational(self.bound),
            "bound_float": float(self.bound),
            "provenance": self.provenance,
            **({"details": self.details} if self.details else {}),
        }

    @classmethod
    def from_json(cls, data: dict) -> RhoCertificate:
        from .graph import parse_rational

        A = Graph(data.get("A_vertices") or {x for ed in data["A"] for x in ed} | set(data["e"]), [tuple(x) for x in data["A"]])
        return cls(edge(*data["e"]), A, parse_rational(data["bound"]), data.get("provenance", "glue"), data.get("details", {}))


def activates(H: Graph, A: Graph, e: Edge) -> bool:
    return closure(H, A.with_edges([], e), confirm=False).final.has_edge(*e)


def certificate_bound(A: Graph, e: Edge) -> Fraction:
    return rho_max(edge_graph(e), A.with_edges([e]))[0]


def _glue_chain(H: Graph, entry: Edge, exit_: Edge, h: int, flip: bool = False) -> tuple[Graph, Edge]:
    """``h`` copies of ``H``; copy ``i``'s ``entry`` is glued onto copy ``i-1``'s
    ``exit``; glued edges and the last exit are removed."""
    fresh = count()
    maps = []
    for i in range(h):
        m: dict[int, int] = {}
        if i:
            prev = maps[-1]
            c, d = prev[exit_[0]], prev[exit_[1]]
            if flip:
                c, d = d, c
            m[entry[0]], m[entry[1]] = c, d
        for v in H.vertices:
            if v not in m:
                m[v] = next(fresh)
        maps.append(m)
    edges = set()
    for m in maps:
        edges.update(edge(m[u], m[v]) for u, v in H.iter_edges())
    removed = {edge(maps[i][exit_[0]], maps[i][exit_[1]]) for i in range(h)}
    verts = {x for m in maps for x in m.values()}
    target = edge(maps[-1][exit_[0]], maps[-1][exit_[1]])
    return Graph(verts, edges - removed), target


def default_exit(H: Graph, shared: Edge) -> Edge:
    """First edge of ``H`` disjoint from ``shared``, else first other edge."""
    others = [f for f in H.edges() if f != shared]
    disjoint = [f for f in others if not set(f) & set(shared)]
    return (disjoint or others)[0]


def ladder(H: Graph, shared: tuple[int, int], h: int, verify: bool = True) -> RhoCertificate:
    """The ``H``-ladder of height ``h``: consecutive copies meet in one edge (the
    image of ``shared`` in the later copy), all such edges and the end edge
    ``e`` removed."""
    if h < 1:
        raise ValidationError("height must be at least 1")
    if H.m < 2:
        raise PreconditionError("ladders need e(H) >= 2")
    shared = edge(*shared)
    if not H.has_edge(*shared):
        raise ValidationError(f"{shared} is not an edge of H")
    exit_ = default_exit(H, shared)
    L, e = _glue_chain(H, shared, exit_, h)
    if verify and not activates(H, L, e):
        raise ConstructionError(f"ladder of height {h} on {shared} does not activate its end edge")
    bound = certificate_bound(L, e)
    return RhoCertificate(e, L, bound, "ladder", {"height": h, "shared": list(shared), "exit": list(exit_)})


def _edge_orbit_reps(H: Graph) -> list[Edge]:
    auts = automorphisms(H, limit=2000)
    seen: set[Edge] = set()
    reps = []
    for f in H.edges():
        if f in seen:
            continue
        reps.append(f)
        seen.update(edge(a[f[0]], a[f[1]]) for a in auts)
    return reps


def _path(start: int, length: int) -> list[Edge]:
    return [(start + i, start + i + 1) for i in range(length)]


def _gadgets(H: Graph, k: int, max_vertices: int):
    """Candidate ``(A, e, provenance)`` triples."""
    reps = _edge_orbit_reps(H)
    for entry in reps:
        for exit_ in H.edges():
            if exit_ == entry:
                continue
            for h in range(1, k + 1):
                if h * (H.n - 2) + 2 - h > max_vertices:
                    break
                for flip in (False, True) if h > 1 else (False,):
                    A, e = _glue_chain(H, entry, exit_, h, flip)
                    if A.n <= max_vertices:
                        yield A, e, "ladder", {"height": h, "shared": list(entry), "exit": list(exit_), "flip": flip}
    has_leaf = any(H.degree(v) == 1 for v in H.vertices)
    if has_leaf:
        for f in H.edges():
            Hm = H.without_edges([f]).canonical()
            for j in range(1, k + 1):
                if j * Hm.n + 2 > max_vertices:
                    break
                edges = [(u + i * Hm.n, v + i * Hm.n) for i in range(j) for u, v in Hm.iter_edges()]
                y, z = j * Hm.n, j * Hm.n + 1
                yield Graph(range(j * Hm.n + 2), edges), (y, z), "glue", {"gadget": "leaf", "removed": list(f), "copies": j}
    if H.cyclomatic_number() > 0:
        for c in range(3, H.n + 1):
            # path with a chord closing a c-cycle in its middle; target joins the ends
            for L in range(c, min(max_vertices, k * H.n + 1)):
                mid = (L - (c - 1)) // 2
                edges = _path(0, L) + [(mid, mid + c - 1)]
                yield Graph(range(L + 1), edges), (0, L), "glue", {"gadget": "chord-path", "cycle": c, "length": L}
        for L in range(2, min(max_vertices - 2, k * H.n + 1)):
            # triangle hanging off the middle of a path
            a = L // 2
            edges = _path(0, L) + [(a, L + 1), (a, L + 2), (L + 1, L + 2)]
            yield Graph(range(L + 3), edges), (0, L), "glue", {"gadget": "triangle-path", "length": L}


def _marked(A: Graph, e: Edge):
    g = A.to_networkx()
    g.add_edge(*e)
    for u, v in g.edges:
        g.edges[u, v]["t"] = edge(u, v) == e
    return g


def rho_upper_bound(H: Graph, max_copies: int = 4, max_vertices: int = MAX_FREE_VERTICES + 2) -> RhoCertificate:
    """Best certificate among generalized ladders and cycle/leaf gadgets within budget.

    Candidates are tried in order of increasing size; one whose overall
    rooted density already reaches the best bound found is skipped, since
    its ``rho_max`` can only be larger.
    """
    import networkx as nx

    H = strip_isolated(H, "rho_upper_bound")
    if H.m == 0:
        raise NoCertificateError("e(H) = 0: no activating pair exists")
    if H.m == 1:
        if H.n > 3:
            A = Graph(range(H.n))
        else:
            A = Graph(range(3))
        return RhoCertificate((0, 1), A, certificate_bound(A, (0, 1)), "special", {"reason": "e(H) = 1"})
    max_vertices = min(max_vertices, MAX_FREE_VERTICES + 2)
    cands = list(_gadgets(H, max_copies, max_vertices))
    cands.sort(key=lambda c: (c[0].n, Fraction(c[0].m, c[0].n - 2)))
    best: RhoCertificate | None = None
    tried: list = []
    em = nx.algorithms.isomorphism.categorical_edge_match("t", False)
    for A, e, prov, info in cands:
        whole = Fraction(A.m, A.n - 2)
        if best is not None and whole >= best.bound:
            continue
        sig = (A.n, A.m, tuple(sorted(A.degree(v) for v in A.vertices)))
        mk = None
        dup = False
        for s, g in tried:
            if s == sig:
                mk = mk or _marked(A, e)
                if nx.is_isomorphic(mk, g, edge_match=em):
                    dup = True
                    break
        if dup:
            continue
        tried.append((sig, mk or _marked(A, e)))
        if not activates(H, A, e):
            continue
        bound = certificate_bound(A, e)
        if best is None or bound < best.bound:
            best = RhoCertificate(e, A, bound, prov, info)
    if best is None:
        raise NoCertificateError("no activating pair found within the budget")
    return best


# ---------------------------------------------------------------------------
# exactly decided classes


def _is_cycle(H: Graph) -> bool:
    return H.n >= 3 and H.is_connected() and all(H.degree(v) == 2 for v in H.vertices)


def _component_cyclomatic(G: Graph) -> list[int]:
    out = []
    for comp in G.components():
        sub = G.induced(comp)
        out.append(sub.m - sub.n + 1)
    return out


def tree_parameter(H: Graph) -> int:
    """``f(H)``: min over edges ``e`` with ``H - e`` a forest of the largest tree's edge count."""
    best = None
    for f in H.edges():
        Hm = H.without_edges([f])
        if Hm.cyclomatic_number() != 0:
            continue
        size = max(len(c) - 1 for c in Hm.components())
        best = size if best is None else min(best, size)
    if best is None:
        raise PreconditionError("no edge deletion leaves a forest")
    return best


def rho_exact_special(H: Graph) -> tuple[Fraction | float, str] | None:
    """``rho(H)`` for the classes where it is known exactly, else ``None``."""
    if H.m == 0:
        return INFINITY, "e(H) = 0"
    H = strip_isolated(H, "rho_exact_special")
    if H.m == 1:
        return Fraction(0), "e(H) = 1"
    cyc = H.cyclomatic_number()
    has_leaf = any(H.degree(v) == 1 for v in H.vertices)
    if has_leaf and cyc <= 1:
        f = tree_parameter(H)
        return Fraction(f, f + 1), f"leaf, at most one cycle (f = {f})"
    if has_leaf:
        return beta(H)[0], "leaf (beta)"
    if _is_cycle(H):
        return Fraction(1), "cycle"
    if cyc >= 2:
        for f in H.edges():
            if all(c <= 1 for c in _component_cyclomatic(H.without_edges([f]))):
                return Fraction(1), "two or more cycles, one edge deletion leaves at most one cycle per component"
    if H.n >= 4 and H.n <= MAX_FREE_VERTICES and is_balanced(H) != Balance.UNBALANCED:
        return lam(H), "balanced"
    return None
