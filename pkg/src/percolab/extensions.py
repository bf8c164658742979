"""Ordered (S, F)-extensions and the fold embedding of an activating pair.

The fold takes a certificate ``(e*, A*)`` and builds, inside a host graph,
a subgraph ``A_g`` that activates a given missing edge ``g``: first a copy
of the modified core of ``e*`` based at ``g``, then for every copy of a red
edge ``f`` placed so far an extension of its core copy by the modified core
of ``f``, until no unprocessed copy remains.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analysis import RhoCertificate, alpha_core, is_alpha_sparse
from .dynamics import WGA, closure
from .embed import Plan, _extend
from .errors import ValidationError
from .graph import Edge, Embedding, Graph, RootedPair, edge, edge_graph, format_rational


def find_extension(spec: RootedPair, anchor: list[int], host: Graph) -> Embedding | None:
    """Embed ``F`` minus the edges inside ``S`` into ``host`` with
    ``spec.order[i] -> anchor[i]``; new vertices avoid the anchor and each other."""
    order = list(spec.order)
    anchor = list(anchor)
    if len(anchor) != len(order):
        raise ValidationError(f"anchor has {len(anchor)} vertices, S has {len(order)}")
    if len(set(anchor)) != len(anchor):
        raise ValidationError("anchor vertices must be distinct")
    if any(not host.has_vertex(x) for x in anchor):
        raise ValidationError("anchor vertex not in host")
    S_set = set(order)
    inner = [(u, v) for u, v in spec.F.iter_edges() if u in S_set and v in S_set]
    Fx = spec.F.without_edges(inner)
    if Fx.n - len(order) > host.n - len(anchor):
        return None
    plan = Plan(Fx, order)
    universe = sorted(host.vertices, reverse=True)
    for imgs in _extend(plan, host._adj, universe, list(anchor), set(anchor), 0):
        return dict(zip(plan.pattern_vertices, imgs))
    return None


@dataclass
class FoldPlan:
    """Everything the fold needs from a certificate, computed once."""

    H: Graph
    cert: RhoCertificate
    alpha: Fraction
    wga: WGA
    cores: dict[Edge, Graph]
    modified: dict[Edge, Graph]
    base: RootedPair
    specs: dict[Edge, RootedPair]
    children: dict[Edge, list[Edge]]
    base_sparse: bool
    sparse: dict[Edge, bool]

    def summary(self) -> dict:
        return {
            "alpha": format_rational(self.alpha),
            "bound": format_rational(self.cert.bound),
            "red_edges": len(self.specs) + 1,
            "max_core_vertices": max((c.n for c in self.cores.values()), default=2),
            "v_modified_core": self.base.F.n,
            "base_sparse": self.base_sparse,
            "all_sparse": self.base_sparse and all(self.sparse.values()),
        }


def prepare_fold(H: Graph, cert: RhoCertificate, alpha: Fraction) -> FoldPlan:
    alpha = Fraction(alpha)
    e0 = cert.e
    G = cert.A.with_edges([], e0)
    wga = WGA(H, G)
    if e0 not in wga.round or wga.is_black(e0):
        raise ValidationError("certificate edge is not activated by A")
    red = sorted(wga.R(e0), key=lambda f: (wga.round[f], f))
    cores: dict[Edge, Graph] = {}

    def core(g: Edge) -> Graph:
        if g not in cores:
            cores[g] = edge_graph(g) if wga.is_black(g) else alpha_core(g, wga.W(g), alpha).core
        return cores[g]

    modified: dict[Edge, Graph] = {}
    children: dict[Edge, list[Edge]] = {}
    for f in red:
        gs = wga.completing_edges(f)
        M = Graph(f)
        for g in gs:
            M = M.union(core(g))
        modified[f] = M
        children[f] = [g for g in gs if not wga.is_black(g)]
    M0 = modified[e0]
    base = RootedPair(edge_graph(e0), M0.with_edges([e0]), tuple(sorted(e0)))
    base_sparse, _ = is_alpha_sparse(base.S, base.F, alpha)
    specs: dict[Edge, RootedPair] = {}
    sparse: dict[Edge, bool] = {}
    for f in red:
        if f == e0:
            continue
        C = core(f)
        F = C.union(modified[f])
        specs[f] = RootedPair(C, F, C.vertices)
        sparse[f] = F.n == C.n or is_alpha_sparse(C, F, alpha)[0]
    return FoldPlan(H, cert, alpha, wga, cores, modified, base, specs, children, base_sparse, sparse)


@dataclass
class FoldState:
    processed: list[tuple[Edge, Edge]] = field(default_factory=list)
    pending: deque = field(default_factory=deque)
    embedded: set[Edge] = field(default_factory=set)
    vertices: set[int] = field(default_factory=set)


@dataclass
class FoldReport:
    g: Edge
    success: bool
    copies_processed: int
    A_g: Graph | None
    failure_point: dict | None = None
    verified: bool | None = None

    def to_json(self) -> dict:
        out = {
            "g": list(self.g),
            "success": self.success,
            "copies_processed": self.copies_processed,
            "v_A_g": self.A_g.n if self.A_g is not None else None,
            "e_A_g": self.A_g.m if self.A_g is not None else None,
        }
        if self.failure_point is not None:
            out["failure_point"] = self.failure_point
        return out


def _place(state: FoldState, spec: RootedPair, emb: Embedding) -> None:
    S = set(spec.order)
    for u, v in spec.F.iter_edges():
        if u in S and v in S:
            continue
        state.embedded.add(edge(emb[u], emb[v]))
    state.vertices.update(emb.values())


def fold_activate(plan: FoldPlan, g: tuple[int, int], host: Graph, max_copies: int = 100_000, verify: bool = True) -> FoldReport:
    """Run the fold based at the missing host edge ``g``."""
    g = edge(*g)
    if host.has_edge(*g):
        raise ValidationError(f"{g} is already an edge of the host")
    state = FoldState()
    e0 = plan.cert.e
    emb = find_extension(plan.base, list(g), host)
    if emb is None:
        fp = {"step": "base", "S": [list(e0)], "F_vertices": plan.base.F.n}
        return FoldReport(g, False, 0, None, fp)
    _place(state, plan.base, emb)
    state.vertices.update(g)
    state.processed.append((e0, g))
    for f in plan.children[e0]:
        state.pending.append((f, {v: emb[v] for v in plan.cores[f].vertices}))
    while state.pending:
        if len(state.processed) >= max_copies:
            fp = {"step": "cap", "max_copies": max_copies}
            return FoldReport(g, False, len(state.processed), None, fp)
        f, psi = state.pending.popleft()
        spec = plan.specs[f]
        anchor = [psi[v] for v in spec.order]
        emb = find_extension(spec, anchor, host)
        copy = edge(psi[f[0]], psi[f[1]])
        if emb is None:
            fp = {
                "step": "extension",
                "red_edge": list(f),
                "copy": list(copy),
                "core_vertices": spec.S.n,
                "modified_core_vertices": spec.F.n,
            }
            return FoldReport(g, False, len(state.processed), None, fp)
        _place(state, spec, emb)
        state.processed.append((f, copy))
        for c in plan.children[f]:
            state.pending.append((c, {v: emb[v] for v in plan.cores[c].vertices}))
    A = Graph(state.vertices, state.embedded)
    report = FoldReport(g, True, len(state.processed), A)
    if verify:
        report.verified = closure(plan.H, A, confirm=False).final.has_edge(*g)
        if not report.verified:
            report.success = False
            report.failure_point = {"step": "verification"}
    return report


def default_alpha(rho: Fraction, n: int, slack_num: int = 1000) -> Fraction:
    """``rho + (rho + 2) / ln n`` rounded up to a rational with denominator ``slack_num``."""
    extra = (float(rho) + 2) / math.log(n)
    return Fraction(rho) + Fraction(math.ceil(extra * slack_num), slack_num)


def fold_regime_p(rho: Fraction, n: int, A: float) -> float:
    """``p`` with ``n p^rho = A log^(2 + 2/b) n`` where ``rho = a/b``; unclipped."""
    b = Fraction(rho).denominator
    return (A * math.log(n) ** (2 + 2 / b) / n) ** (1 / float(rho))


def fold_experiment(
    H: Graph,
    plan: FoldPlan,
    n: int,
    p: float,
    trials: int,
    seed: int,
    max_copies: int = 100_000,
) -> dict:
    """Fold at a uniformly chosen missing edge of independent ``G(n, p)`` hosts."""
    from .random_graphs import sample_gnp, trial_rng

    rows = []
    for t in range(trials):
        rng = trial_rng(seed, "fold", t)
        host = sample_gnp(n, p, rng=rng)
        missing = None
        for _ in range(1000):
            u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
            if not host.has_edge(u, v):
                missing = edge(u, v)
                break
        if missing is None:
            rows.append({"trial": t, "g": None, "success": False, "failure_point": {"step": "no missing edge"}})
            continue
        rep = fold_activate(plan, missing, host, max_copies=max_copies)
        row = {"trial": t, **rep.to_json(), "verified": rep.verified}
        rows.append(row)
    wins = sum(1 for r in rows if r["success"])
    return {"n": n, "p": p, "trials": trials, "successes": wins, "success_rate": wins / trials if trials else 0.0, "seed": seed, "rows": rows}


def extension_experiment(spec: RootedPair, n: int, p: float, trials: int, seed: int) -> dict:
    """Frequency with which a random anchor in ``G(n, p)`` (vertices in
    increasing order) has an ``(S, F)``-extension."""
    from .random_graphs import sample_gnp, trial_rng

    hits = 0
    k = len(spec.order)
    for t in range(trials):
        rng = trial_rng(seed, "extension", t)
        host = sample_gnp(n, p, rng=rng)
        anchor = sorted(int(x) for x in rng.choice(n, size=k, replace=False))
        if find_extension(spec, anchor, host) is not None:
            hits += 1
    freq = hits / trials if trials else 0.0
    return {"n": n, "p": p, "trials": trials, "statistic": freq, "seed": seed}
