"""Backtracking subgraph embedding: anchored copy search and containment tests.

Embeddings are labeled (automorphisms of the pattern are not quotiented), so
an unordered copy of ``H`` may be reported several times.
"""

from __future__ import annotations

from typing import Iterator, Mapping, Sequence

from .graph import Edge, Embedding, Graph, edge


class Plan:
    """Search order for a pattern with some vertices pre-assigned.

    ``steps[i] = (p, back, need)``: pattern vertex ``p`` is placed i-th (after
    the fixed ones), ``back`` are the positions of already placed neighbours
    whose images must be adjacent to its image, ``need`` is its degree in the
    required part of the pattern (a host-degree lower bound).
    """

    __slots__ = ("pattern_vertices", "fixed", "steps", "anchor_at", "skip")

    def __init__(self, H: Graph, fixed: Sequence[int], skip: Edge | None = None, anchor: Edge | None = None):
        self.skip = skip
        self.fixed = tuple(fixed)
        nbrs = {p: set(H.neighbors(p)) for p in H.vertices}
        if skip is not None:
            a, b = skip
            nbrs[a].discard(b)
            nbrs[b].discard(a)
        placed = list(self.fixed)
        pos = {p: i for i, p in enumerate(placed)}
        rest = [p for p in H.vertices if p not in pos]
        anchor_set = set(anchor) if anchor else set()
        steps = []
        while rest:
            def key(p):
                k = sum(1 for q in nbrs[p] if q in pos)
                return (k > 0, p in anchor_set, k, len(nbrs[p]), -p)

            p = max(rest, key=key)
            rest.remove(p)
            back = tuple(sorted(pos[q] for q in nbrs[p] if q in pos))
            pos[p] = len(placed)
            placed.append(p)
            steps.append((p, back, len(nbrs[p])))
        self.pattern_vertices = tuple(placed)
        self.steps = tuple(steps)
        # index (into placed) after which both anchor endpoints are assigned
        if anchor is not None:
            self.anchor_at = max(pos[anchor[0]], pos[anchor[1]])
        else:
            self.anchor_at = -1

    def fixed_constraints(self, H: Graph) -> list[tuple[int, int]]:
        """Pairs of fixed positions whose images must be adjacent."""
        out = []
        for i, p in enumerate(self.fixed):
            for j in range(i):
                q = self.fixed[j]
                if H.has_edge(p, q) and (self.skip is None or edge(p, q) != self.skip):
                    out.append((j, i))
        return out


def _extend(
    plan: Plan,
    adj: Mapping[int, frozenset[int]] | Sequence[set[int]],
    universe: Sequence[int],
    images: list[int],
    used: set[int],
    depth: int,
) -> Iterator[list[int]]:
    if depth == len(plan.steps):
        yield images
        return
    _, back, need = plan.steps[depth]
    if back:
        cand = adj[images[back[0]]]
        if len(back) > 1:
            cand = cand.intersection(*(adj[images[j]] for j in back[1:]))
        order = sorted(cand, reverse=True)
    else:
        order = universe
    for x in order:
        if x in used or len(adj[x]) < need:
            continue
        images.append(x)
        used.add(x)
        yield from _extend(plan, adj, universe, images, used, depth + 1)
        used.discard(x)
        images.pop()


def embeddings_with_fixed(
    H: Graph,
    G: Graph,
    fixed: Mapping[int, int],
    skip: Edge | None = None,
    plan: Plan | None = None,
) -> Iterator[Embedding]:
    """All injective maps of ``V(H)`` into ``V(G)`` extending ``fixed`` that send
    every edge of ``H`` (except ``skip``) onto an edge of ``G``."""
    if plan is None:
        plan = Plan(H, list(fixed), skip)
    adj = G._adj
    images = [fixed[p] for p in plan.fixed]
    if len(set(images)) != len(images) or any(x not in adj for x in images):
        return
    for i, j in plan.fixed_constraints(H):
        if images[i] not in adj[images[j]]:
            return
    universe = sorted(G.vertices, reverse=True)
    for imgs in _extend(plan, adj, universe, images, set(images), 0):
        yield dict(zip(plan.pattern_vertices, imgs))


def enumerate_anchored_copies(H: Graph, eH: tuple[int, int], G: Graph, eG: tuple[int, int]) -> Iterator[Embedding]:
    """Embeddings of ``H`` into the clique on ``V(G)`` with ``eH -> eG`` and all
    other edges of ``H`` on edges of ``G``.

    The orientation ``(a, b) -> (x, y)`` is tried before ``(a, b) -> (y, x)``
    where ``eH = (a, b)`` and ``eG = (x, y)`` are normalized ascending.
    Within one orientation, host candidates are tried in descending id order.
    """
    a, b = edge(*eH)
    if not H.has_edge(a, b):
        raise ValueError(f"{eH} is not an edge of H")
    x, y = edge(*eG)
    plan = Plan(H, [a, b], skip=(a, b))
    yield from embeddings_with_fixed(H, G, {a: x, b: y}, (a, b), plan)
    yield from embeddings_with_fixed(H, G, {a: y, b: x}, (a, b), plan)


def find_copy(pattern: Graph, host: Graph) -> Embedding | None:
    """One (not necessarily induced) copy of ``pattern`` in ``host``, or None."""
    if pattern.n == 0:
        return {}
    if pattern.n > host.n:
        return None
    plan = Plan(pattern, [])
    universe = sorted(host.vertices, reverse=True)
    for imgs in _extend(plan, host._adj, universe, [], set(), 0):
        return dict(zip(plan.pattern_vertices, imgs))
    return None


def contains(pattern: Graph, host: Graph) -> bool:
    return find_copy(pattern, host) is not None


def automorphisms(H: Graph, limit: int = 20000) -> list[dict[int, int]]:
    """Automorphisms of ``H`` (at most ``limit`` of them, identity first)."""
    from networkx.algorithms.isomorphism import GraphMatcher

    g = H.to_networkx()
    out = [{v: v for v in H.vertices}]
    for k, m in enumerate(GraphMatcher(g, g).isomorphisms_iter()):
        if k >= limit:
            break
        if any(m[v] != v for v in m):
            out.append(dict(m))
    return out


def is_isomorphic(A: Graph, B: Graph) -> bool:
    if A.n != B.n or A.m != B.m:
        return False
    if sorted(A.degree(v) for v in A.vertices) != sorted(B.degree(v) for v in B.vertices):
        return False
    import networkx as nx

    return nx.is_isomorphic(A.to_networkx(), B.to_networkx())


def dedupe_isomorphic(graphs: Sequence[Graph]) -> list[Graph]:
    out: list[Graph] = []
    for g in graphs:
        if not any(is_isomorphic(g, h) for h in out):
            out.append(g)
    return out
