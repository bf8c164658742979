"""H-bootstrap dynamics: closure, percolation, witness graphs and dense parts.

The closure engine is synchronous (round ``t`` only sees edges active after
round ``t-1``) and incremental: every edge activated in round ``t+1`` lies in
a copy of ``H`` that uses at least one edge activated in round ``t``, so each
round only searches copies pivoting on the previous round's edges.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .density import subset_edge_counts, subset_sizes
from .embed import Plan, _extend
from .errors import CertificateError, NotActivatedError, SizeError
from .graph import Edge, Embedding, Graph, edge, edge_graph

CONFIRM_MAX_VERTICES = 128


# ---------------------------------------------------------------------------
# compiled pattern


def _automorphism_generators(H: Graph, count: int = 24, seed: int = 0) -> list[tuple[int, ...]]:
    """A few automorphisms of a pattern on ``range(h)`` (not necessarily a
    generating set; orbits computed from them are only ever too fine)."""
    from networkx.algorithms.isomorphism import GraphMatcher

    g = H.to_networkx()
    h = H.n
    gens = []
    for k, m in enumerate(GraphMatcher(g, g).isomorphisms_iter()):
        if k >= count:
            break
        gens.append(tuple(m[i] for i in range(h)))
    rng = random.Random(seed)
    for _ in range(count):
        perm = list(range(h))
        rng.shuffle(perm)
        gp = H.relabel(dict(enumerate(perm))).to_networkx()
        m = next(GraphMatcher(g, gp).isomorphisms_iter())
        inv = {p: i for i, p in enumerate(perm)}
        gens.append(tuple(inv[m[i]] for i in range(h)))
    return [p for p in set(gens) if any(p[i] != i for i in range(h))]


def _has_bridges(H: Graph) -> bool:
    import networkx as nx

    return nx.has_bridges(H.to_networkx())


class Rules:
    """Search plans for one pattern ``H`` (relabelled to ``range(v(H))``)."""

    def __init__(self, H: Graph):
        self.original = H
        self.labels = H.vertices
        Hc = H.canonical()
        self.H = Hc
        self.h = Hc.n
        self.e = Hc.m
        self.edges = Hc.edges()
        degs = [Hc.degree(v) for v in Hc.vertices if Hc.degree(v) > 0]
        self.delta = min(degs) if degs else 0
        self.bridgeless = self.e >= 1 and not _has_bridges(Hc)
        self.pivots = self._pivot_plans() if self.e >= 2 else []
        self.anchor_plans = {e: Plan(Hc, list(e), skip=e) for e in self.edges}

    def _pivot_plans(self):
        Hc = self.H
        triples = [(ab, p, q) for ab in self.edges for (u, v) in self.edges if (u, v) != ab for (p, q) in ((u, v), (v, u))]
        parent = {t: t for t in triples}

        def find(t):
            while parent[t] != t:
                parent[t] = parent[parent[t]]
                t = parent[t]
            return t

        for g in _automorphism_generators(Hc):
            for t in triples:
                (a, b), p, q = t
                s = (edge(g[a], g[b]), g[p], g[q])
                ra, rb = find(t), find(s)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        plans = []
        for t in triples:
            if find(t) != t:
                continue
            ab, p, q = t
            plan = Plan(Hc, [p, q], skip=ab, anchor=ab)
            pos = {v: i for i, v in enumerate(plan.pattern_vertices)}
            steps = tuple((back, need) for _, back, need in plan.steps)
            plans.append((steps, plan.anchor_at, pos[ab[0]], pos[ab[1]]))
        return plans


@lru_cache(maxsize=64)
def _rules_cached(key: tuple) -> Rules:
    verts, edges = key
    return Rules(Graph(verts, edges))


def compile_pattern(H: Graph) -> Rules:
    return _rules_cached((H.vertices, tuple(H.edges())))


# ---------------------------------------------------------------------------
# round engine


class _Engine:
    """Mutable active-edge state over vertex positions ``range(n)``."""

    def __init__(self, rules: Rules, G: Graph):
        self.rules = rules
        self.verts = G.vertices
        self.n = G.n
        if self.verts == tuple(range(self.n)):
            self.adj = [set(G.neighbors(v)) for v in self.verts]
        else:
            idx = G.index
            self.adj = [{idx[w] for w in G.neighbors(v)} for v in self.verts]
        self.universe = list(range(self.n))
        self.universe_desc = self.universe[::-1]

    def edges_out(self, pairs: Iterable[Edge]) -> list[Edge]:
        if self.verts == tuple(range(self.n)):
            return sorted(pairs)
        vs = self.verts
        return sorted(edge(vs[u], vs[v]) for u, v in pairs)

    def initial_frontier(self) -> list[Edge]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def round(self, frontier: list[Edge]) -> list[Edge]:
        """Pairs activated by one synchronous step given last round's edges."""
        rules = self.rules
        if rules.e == 0:
            return []
        if rules.e == 1:
            if not frontier and self.n >= rules.h:
                return [(u, v) for u in range(self.n) for v in range(u + 1, self.n) if v not in self.adj[u]]
            return []
        adj = self.adj
        universe = self.universe
        found: set[Edge] = set()
        for steps, anchor_at, ia, ib in rules.pivots:
            total = len(steps) + 2
            images = [0] * total

            def rec(d: int) -> bool:
                if d == total:
                    return True
                back, need = steps[d - 2]
                if back:
                    cand = adj[images[back[0]]]
                    if len(back) > 1:
                        cand = cand.intersection(*[adj[images[j]] for j in back[1:]])
                else:
                    cand = universe
                for z in cand:
                    if z in used or len(adj[z]) < need:
                        continue
                    images[d] = z
                    if d == anchor_at:
                        u, v = images[ia], images[ib]
                        if v in adj[u]:
                            continue
                        pair = (u, v) if u < v else (v, u)
                        if pair in found:
                            continue
                        used.add(z)
                        if rec(d + 1):
                            found.add(pair)
                        used.discard(z)
                    elif d > anchor_at:
                        used.add(z)
                        ok = rec(d + 1)
                        used.discard(z)
                        if ok:
                            return True
                    else:
                        used.add(z)
                        rec(d + 1)
                        used.discard(z)
                return False

            # both orientations of each pattern edge are separate plans
            for x, y in frontier:
                images[0] = x
                images[1] = y
                used = {x, y}
                rec(2)
        return sorted(found)

    def apply(self, pairs: list[Edge]) -> None:
        adj = self.adj
        for u, v in pairs:
            adj[u].add(v)
            adj[v].add(u)

    def is_complete(self) -> bool:
        return all(len(s) == self.n - 1 for s in self.adj)

    def activatable(self, u: int, v: int) -> Embedding | None:
        """First anchored copy completed by the pair ``(u, v)`` (canonical order)."""
        for ab, plan in self.rules.anchor_plans.items():
            for x, y in ((u, v), (v, u)):
                images = [x, y]
                for imgs in _extend(plan, self.adj, self.universe_desc, images, {x, y}, 0):
                    return dict(zip(plan.pattern_vertices, imgs))
        return None

    def sweep(self) -> list[Edge]:
        """Full rescan: every inactive pair completing some copy."""
        rules = self.rules
        if rules.e == 0:
            return []
        out = []
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if v in self.adj[u]:
                    continue
                if rules.e == 1 and self.n >= rules.h:
                    out.append((u, v))
                elif rules.e >= 2 and self.activatable(u, v) is not None:
                    out.append((u, v))
        return out

    def graph(self) -> Graph:
        if self.verts == tuple(range(self.n)):
            return Graph._raw(self.verts, {i: frozenset(s) for i, s in enumerate(self.adj)})
        vs = self.verts
        return Graph._raw(vs, {vs[i]: frozenset(vs[j] for j in s) for i, s in enumerate(self.adj)})


# ---------------------------------------------------------------------------
# public operations


@dataclass
class ClosureTrace:
    """Rounds of a closure run.

    ``rounds[t-1]`` holds the edges activated at time ``t``; ``copies`` maps
    each activated edge to the embedding of ``H`` it completed (pattern
    vertex -> host vertex), when recorded.
    """

    H: Graph
    G: Graph
    rounds: list[list[Edge]]
    final: Graph
    copies: dict[Edge, Embedding] = field(default_factory=dict)

    @property
    def activated(self) -> list[Edge]:
        return [e for r in self.rounds for e in r]

    def round_of(self) -> dict[Edge, int]:
        out = {e: 0 for e in self.G.iter_edges()}
        for t, r in enumerate(self.rounds, 1):
            for e in r:
                out[e] = t
        return out

    def to_json(self) -> dict:
        return {
            "v": self.G.n,
            "initial_edges": [list(e) for e in self.G.edges()],
            "rounds": [[list(e) for e in r] for r in self.rounds],
            "final_edges": self.final.m,
            "complete": self.final.is_complete(),
        }


def step(H: Graph, G: Graph) -> list[Edge]:
    """Edges added to ``G`` by one step of the ``H``-dynamics on ``K_{V(G)}``."""
    eng = _Engine(compile_pattern(H), G)
    if eng.rules.e == 1:
        return eng.edges_out(eng.round([]))
    return eng.edges_out(eng.round(eng.initial_frontier()))


def closure(H: Graph, G: Graph, record_copies: bool = False, confirm: bool | None = None) -> ClosureTrace:
    """Run the ``H``-dynamics from ``G`` to its fixed point ``<G>_H``."""
    rules = compile_pattern(H)
    eng = _Engine(rules, G)
    if confirm is None:
        confirm = eng.n <= CONFIRM_MAX_VERTICES
    rounds: list[list[Edge]] = []
    copies: dict[Edge, Embedding] = {}
    frontier = [] if rules.e == 1 else eng.initial_frontier()
    while True:
        new = eng.round(frontier)
        if not new and confirm:
            new = eng.sweep()
            if new:
                warnings.warn("incremental closure missed activatable edges; continuing from full sweep")
        if not new:
            break
        if record_copies:
            for u, v in new:
                emb = eng.activatable(u, v)
                copies[(u, v)] = emb
        eng.apply(new)
        rounds.append(new)
        frontier = new
    if eng.verts != tuple(range(eng.n)):
        vs = eng.verts
        rounds = [eng.edges_out(r) for r in rounds]
        copies = {edge(vs[u], vs[v]): {k: vs[x] for k, x in emb.items()} for (u, v), emb in copies.items()}
    if record_copies:
        lab = rules.labels
        copies = {e: {lab[p]: x for p, x in emb.items()} for e, emb in copies.items()}
    return ClosureTrace(H, G, rounds, eng.graph(), copies)


def _find_clique(adj: list[set[int]], base: list[int], cand: set[int], size: int) -> list[int] | None:
    if len(base) == size:
        return base
    for z in sorted(cand):
        got = _find_clique(adj, base + [z], cand & adj[z], size)
        if got:
            return got
    return None


def _bootstrap(adj: list[set[int]], seed: Iterable[int], k: int) -> set[int]:
    infected = set(seed)
    count: dict[int, int] = {}
    queue = list(infected)
    while queue:
        v = queue.pop()
        for w in adj[v]:
            if w in infected:
                continue
            c = count.get(w, 0) + 1
            if c >= k:
                infected.add(w)
                queue.append(w)
            else:
                count[w] = c
    return infected


def percolates(H: Graph, G: Graph) -> bool:
    """Whether ``<G>_H`` is the complete graph on ``V(G)``.

    Besides the plain round loop this uses three exact shortcuts:

    * a vertex of active degree below ``delta(H) - 1`` can never gain an
      edge, so the process cannot percolate;
    * if every edge of ``H`` lies on a cycle, an activated edge always joins
      two vertices that were already connected, so a disconnected graph
      stays disconnected;
    * if the active graph has a clique ``Q`` with ``|Q| >= v(H) - 1``, then
      ``Q`` absorbs (as a clique of the closure) every vertex with at least
      ``delta(H) - 1`` active neighbours in it, so a vertex bootstrap with
      threshold ``delta(H) - 1`` started at ``Q`` that reaches all vertices
      certifies percolation.
    """
    rules = compile_pattern(H)
    n = G.n
    if G.is_complete():
        return True
    if rules.e == 0:
        return False
    if rules.e == 1:
        return n >= rules.h
    eng = _Engine(rules, G)
    k = rules.delta - 1
    if any(len(s) < k for s in eng.adj):
        return False
    if rules.bridgeless and not G.is_connected():
        return False
    size = max(rules.h - 1, 2)
    adj = eng.adj
    best: set[int] = set()
    frontier = eng.initial_frontier()
    while True:
        if n >= rules.h:
            if best:
                best = _bootstrap(adj, best, k)
                if len(best) == n:
                    return True
            seen: list[set[int]] = []
            for x, y in frontier:
                if x in best and y in best:
                    continue
                q = _find_clique(adj, [x, y], adj[x] & adj[y], size)
                if q is None or all(z in best for z in q):
                    continue
                if any(all(z in s for z in q) for s in seen):
                    continue
                inf = _bootstrap(adj, q, k)
                if len(inf) == n:
                    return True
                seen.append(inf)
                if len(inf) > len(best):
                    best = inf
        new = eng.round(frontier)
        if not new:
            return eng.is_complete()
        eng.apply(new)
        frontier = new


# ---------------------------------------------------------------------------
# witness graphs


@dataclass
class WitnessRecord:
    """Witness data for one edge of the closure.

    ``W`` are the black (initially active) edges, ``R`` the red edges; ``He``
    is the completing copy (``None`` for an initially active edge) and ``F``
    the dense part when computed.
    """

    e: Edge
    W: Graph
    R: frozenset[Edge]
    He: Embedding | None
    F: Graph | None = None
    round: int = 0

    def to_json(self) -> dict:
        out = {
            "target": list(self.e),
            "round": self.round,
            "W": [list(x) for x in self.W.edges()],
            "W_vertices": list(self.W.vertices),
            "R": [list(x) for x in sorted(self.R)],
            "He": None if self.He is None else {str(k): v for k, v in sorted(self.He.items())},
        }
        if self.F is not None:
            out["F"] = [list(x) for x in self.F.edges()]
            out["F_vertices"] = list(self.F.vertices)
        return out


class WGA:
    """The witness graph algorithm run alongside a recorded closure of ``G``."""

    def __init__(self, H: Graph, G: Graph, trace: ClosureTrace | None = None):
        self.H = H
        self.G = G
        self.trace = trace if trace is not None else closure(H, G, record_copies=True)
        self.round = self.trace.round_of()
        self._W: dict[Edge, tuple[frozenset[int], frozenset[Edge]]] = {}
        self._R: dict[Edge, frozenset[Edge]] = {}
        for e in G.iter_edges():
            self._W[e] = (frozenset(e), frozenset([e]))
            self._R[e] = frozenset()
        Hedges = H.edges()
        for e in self.trace.activated:
            emb = self.trace.copies[e]
            verts = set(e)
            black: set[Edge] = set()
            red = {e}
            for f in self.copy_edges(emb, Hedges):
                if f == e:
                    continue
                vf, bf = self._W[f]
                verts |= vf
                black |= bf
                red |= self._R[f]
            self._W[e] = (frozenset(verts), frozenset(black))
            self._R[e] = frozenset(red)

    @staticmethod
    def copy_edges(emb: Embedding, Hedges: list[Edge]) -> list[Edge]:
        return [edge(emb[a], emb[b]) for a, b in Hedges]

    def is_black(self, f: Edge) -> bool:
        return self.round.get(f) == 0

    def completing_edges(self, e: Edge) -> list[Edge]:
        """Edges of ``H_e - e``."""
        emb = self.trace.copies[e]
        return [f for f in self.copy_edges(emb, self.H.edges()) if f != e]

    def W(self, e: Edge) -> Graph:
        verts, black = self._W[e]
        return Graph(verts, black)

    def R(self, e: Edge) -> frozenset[Edge]:
        return self._R[e]

    def record(self, e: Edge) -> WitnessRecord:
        e = edge(*e)
        if e not in self.round:
            raise NotActivatedError(f"edge {e} is not in the closure")
        return WitnessRecord(e, self.W(e), self._R[e], self.trace.copies.get(e), None, self.round[e])


def witness(H: Graph, G: Graph, target: tuple[int, int]) -> WitnessRecord:
    return WGA(H, G).record(target)


# ---------------------------------------------------------------------------
# dense parts


@dataclass
class DensePart:
    F: Graph
    defined: bool
    round: int


def _max_dense_subset(Fp: Graph, e: Edge, rho: Fraction) -> Graph | None:
    """Largest induced ``F ⊆ Fp`` containing ``e`` with ``(e(F)-1)/(v(F)-2) >= rho``."""
    free = [v for v in Fp.vertices if v not in e]
    if not free:
        return None
    if len(free) > 24:
        raise SizeError(f"dense part search over {len(free)} vertices exceeds the cap of 24")
    pos = {v: i for i, v in enumerate(free)}
    masks, weights = [], []
    for v in free:
        m = w = 0
        for u in Fp.neighbors(v):
            if u in pos:
                m |= 1 << pos[u]
            else:
                w += 1
        masks.append(m)
        weights.append(w)
    base = 1 if Fp.has_edge(*e) else 0
    gain = subset_edge_counts(masks, weights) + (base - 1)
    size = subset_sizes(len(free))
    ok = (size > 0) & (gain.astype(np.int64) * rho.denominator >= size.astype(np.int64) * rho.numerator)
    if not ok.any():
        return None
    k = int(size[ok].max())
    cands = np.flatnonzero(ok & (size == k))
    from .density import _lex_first

    x = _lex_first(cands, len(free))
    return Fp.induced(list(e) + [free[i] for i in range(len(free)) if x >> i & 1])


def dense_parts(wga: WGA, rho: Fraction) -> dict[Edge, DensePart]:
    """Dense parts ``F_e`` for every edge of the closure, by the inductive
    construction over activation rounds (``rho`` must not exceed ``rho(H)``)."""
    out: dict[Edge, DensePart] = {}
    for e in wga.G.iter_edges():
        out[e] = DensePart(edge_graph(e), True, 0)
    for e in wga.trace.activated:
        t = wga.round[e]
        fs = wga.completing_edges(e)
        verts = set(e)
        edges = {e}
        for f in fs:
            Ff = out[f].F
            verts |= set(Ff.vertices)
            edges |= Ff.edge_set()
        for f in fs:
            if not wga.is_black(f):
                edges.discard(f)
        Fp = Graph(verts, edges)
        F = _max_dense_subset(Fp, e, rho)
        if F is None:
            if t == 1:
                raise CertificateError(
                    f"no subgraph of the completing copy of {e} reaches density {rho}; the bound exceeds rho(H)"
                )
            out[e] = DensePart(edge_graph(e), False, t)
        else:
            out[e] = DensePart(F, True, t)
    return out


def dense_part(H: Graph, G: Graph, e: tuple[int, int], rho: Fraction, wga: WGA | None = None) -> DensePart:
    wga = wga or WGA(H, G)
    e = edge(*e)
    if e not in wga.round:
        raise NotActivatedError(f"edge {e} is not in the closure")
    return dense_parts(wga, rho)[e]


# ---------------------------------------------------------------------------
# weak saturation


def wsat_bollobas(n: int, r: int) -> Graph:
    """The ``r``-Bollobás graph: a ``K_{r-2}`` and then each new vertex joined
    to the ``r-2`` most recently added ones."""
    if r < 3:
        raise SizeError("r must be at least 3")
    k = r - 2
    if n < k:
        raise SizeError(f"n must be at least r-2 = {k}")
    edges = [(i, j) for j in range(k) for i in range(j)]
    for v in range(k, n):
        edges.extend((u, v) for u in range(v - k, v))
    return Graph(range(n), edges)


def wsat_formula(n: int, r: int) -> int:
    return (r - 2) * n - (r - 1) * (r - 2) // 2
