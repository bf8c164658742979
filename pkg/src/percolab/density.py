"""Exact rooted densities: rho(A, B), rho_max, m_2, lambda, lambda_*, beta.

Every maximization over subgraphs reduces to a maximization over vertex
sets (for a fixed vertex set the induced subgraph has the most edges), and
vertex sets are enumerated exhaustively with a vectorized subset DP.
"""

from __future__ import annotations

import enum
import warnings
from fractions import Fraction

import numpy as np

from .errors import ContainmentError, DegeneratePairError, PreconditionError, SizeError
from .graph import Graph

MAX_FREE_VERTICES = 24


class Balance(str, enum.Enum):
    STRICT = "strictly-balanced"
    BALANCED = "balanced"
    UNBALANCED = "unbalanced"


def strip_isolated(H: Graph, where: str = "") -> Graph:
    iso = H.isolated_vertices()
    if not iso:
        return H
    warnings.warn(
        f"{where or 'pattern'}: dropping {len(iso)} isolated vertices of H",
        stacklevel=3,
    )
    return H.induced(v for v in H.vertices if H.degree(v) > 0)


def subset_edge_counts(local_masks: list[int], weights: list[int] | None = None) -> np.ndarray:
    """``out[X] = e(X) + sum(weights[i] for i in X)`` for every bitmask ``X``.

    ``local_masks[i]`` is the neighbourhood of vertex ``i`` as a bitmask over
    ``range(len(local_masks))``.
    """
    r = len(local_masks)
    if r > MAX_FREE_VERTICES:
        raise SizeError(f"exhaustive subset enumeration over {r} vertices exceeds the cap of {MAX_FREE_VERTICES}")
    dtype = np.int32
    out = np.zeros(1, dtype=dtype)
    for k in range(r):
        low = local_masks[k] & ((1 << k) - 1)
        idx = np.arange(1 << k, dtype=np.uint32)
        add = np.bitwise_count(idx & np.uint32(low)).astype(dtype)
        if weights is not None:
            add += weights[k]
        out = np.concatenate([out, out + add])
    return out


def subset_sizes(r: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << r, dtype=np.uint32)).astype(np.int32)


def _lex_first(cands: np.ndarray, r: int) -> int:
    """Among equal-size bitmasks, the one whose sorted member list is smallest."""
    for i in range(r):
        sub = cands[((cands >> i) & 1) == 1]
        if sub.size:
            cands = sub
        if cands.size == 1:
            break
    return int(cands[0])


def _best_ratio(num: np.ndarray, den: np.ndarray, valid: np.ndarray, maximize: bool = True):
    """Exact extremum of num/den over valid entries; returns (Fraction, mask of maximizers)."""
    if not valid.any():
        return None, valid
    ratio = np.where(valid, num / np.where(den == 0, 1, den), -np.inf if maximize else np.inf)
    m = ratio.max() if maximize else ratio.min()
    near = valid & (np.abs(ratio - m) <= 1e-9 * max(1.0, abs(m)))
    pairs = set(zip(num[near].tolist(), den[near].tolist()))
    fr = [Fraction(a, b) for a, b in pairs]
    best = max(fr) if maximize else min(fr)
    hit = valid & (num * best.denominator == den * best.numerator)
    return best, hit


def rho_pair(A: Graph, B: Graph) -> Fraction:
    """``(e(B) - e(A)) / (v(B) - v(A))`` for ``A`` a subgraph of ``B``."""
    if not A.is_subgraph_of(B):
        raise ContainmentError("A is not a subgraph of B")
    dv = B.n - A.n
    if dv == 0:
        raise DegeneratePairError("v(A) = v(B)")
    return Fraction(B.m - A.m, dv)


def rho_max(S: Graph, F: Graph) -> tuple[Fraction, frozenset[int]]:
    """Maximum of ``rho(S, B')`` over ``S ⊂ B' ⊆ F`` with ``v(B') > v(S)``.

    Returns the value and the vertex set of a maximizer; ties go to the
    smallest vertex set, then the lexicographically first one.
    """
    if not S.is_subgraph_of(F):
        raise ContainmentError("S is not a subgraph of F")
    sv = set(S.vertices)
    free = [v for v in F.vertices if v not in sv]
    if not free:
        raise DegeneratePairError("F has no vertices outside S")
    pos = {v: i for i, v in enumerate(free)}
    masks, weights = [], []
    for v in free:
        m = 0
        w = 0
        for u in F.neighbors(v):
            if u in pos:
                m |= 1 << pos[u]
            else:
                w += 1
        masks.append(m)
        weights.append(w)
    inside = sum(1 for u, v in F.iter_edges() if u in sv and v in sv) - S.m
    gain = subset_edge_counts(masks, weights) + inside
    size = subset_sizes(len(free))
    valid = size > 0
    best, hit = _best_ratio(gain, size, valid)
    k = int(size[hit].min())
    cands = np.flatnonzero(hit & (size == k))
    x = _lex_first(cands, len(free))
    chosen = frozenset(sv | {free[i] for i in range(len(free)) if x >> i & 1})
    return best, chosen


def rho_max_value(S: Graph, F: Graph) -> Fraction:
    return rho_max(S, F)[0]


def _all_subset_counts(G: Graph) -> tuple[np.ndarray, np.ndarray]:
    if G.n > MAX_FREE_VERTICES:
        raise SizeError(f"graph has {G.n} vertices; exhaustive enumeration capped at {MAX_FREE_VERTICES}")
    return subset_edge_counts(list(G.masks)), subset_sizes(G.n)


def two_density(G: Graph) -> Fraction:
    """``m_2(G)``: max of ``(e(F)-1)/(v(F)-2)`` over subgraphs with ``v(F) >= 3``."""
    if G.n < 3:
        raise SizeError("2-density needs at least 3 vertices")
    e, s = _all_subset_counts(G)
    best, _ = _best_ratio(e - 1, s - 2, s >= 3)
    return best


def lam(H: Graph) -> Fraction:
    """``(e(H)-2)/(v(H)-2)``."""
    H = strip_isolated(H, "lambda")
    if H.n < 3:
        raise SizeError("lambda needs v(H) >= 3")
    return Fraction(H.m - 2, H.n - 2)


def lambda_star(H: Graph) -> Fraction:
    """Min of ``(e(H)-e(F)-1)/(v(H)-v(F))`` over ``F ⊂ H`` with ``2 <= v(F) < v(H)``."""
    H = strip_isolated(H, "lambda_star")
    if H.n < 3:
        raise SizeError("lambda_* needs v(H) >= 3")
    e, s = _all_subset_counts(H)
    best, _ = _best_ratio(H.m - e - 1, H.n - s, (s >= 2) & (s < H.n), maximize=False)
    return best


def max_proper_rooted_density(H: Graph) -> Fraction:
    """Max of ``(e(F)-1)/(v(F)-2)`` over ``F ⊂ H`` with ``3 <= v(F) < v(H)``."""
    e, s = _all_subset_counts(H)
    best, _ = _best_ratio(e - 1, s - 2, (s >= 3) & (s < H.n))
    return best


def is_balanced(H: Graph) -> Balance:
    H = strip_isolated(H, "is_balanced")
    if H.n < 4:
        raise SizeError("balance is defined for v(H) >= 4")
    top = max_proper_rooted_density(H)
    lm = Fraction(H.m - 2, H.n - 2)
    if top < lm:
        return Balance.STRICT
    if top == lm:
        return Balance.BALANCED
    return Balance.UNBALANCED


def max_density(G: Graph) -> Fraction:
    """``rho_max(∅, G)``: max of ``e(F)/v(F)`` over nonempty ``F ⊆ G``."""
    if G.n == 0:
        raise DegeneratePairError("empty graph")
    e, s = _all_subset_counts(G)
    best, _ = _best_ratio(e, s, s > 0)
    return best


def beta(H: Graph) -> tuple[Fraction, list[Graph]]:
    """``min_e rho_max(∅, H - e)`` and the minimizing ``H - e`` up to isomorphism."""
    from .embed import dedupe_isomorphic

    H = strip_isolated(H, "beta")
    if not any(H.degree(v) == 1 for v in H.vertices):
        raise PreconditionError("beta needs H to have a leaf")
    vals = []
    for uv in H.edges():
        Hm = H.without_edges([uv])
        vals.append((max_density(Hm), Hm))
    b = min(v for v, _ in vals)
    family = dedupe_isomorphic([g for v, g in vals if v == b])
    return b, family
