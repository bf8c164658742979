import itertools
import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from percolab.density import (
    Balance,
    beta,
    is_balanced,
    lam,
    lambda_star,
    max_density,
    rho_max,
    rho_pair,
    two_density,
)
from percolab.errors import ContainmentError, DegeneratePairError, PreconditionError, SizeError
from percolab.graph import Graph, complete_graph, edge_graph
from percolab.patterns import complete_bipartite, cycle, paw, path, star

from conftest import graphs, random_graph


def brute_rho_max(S: Graph, F: Graph) -> Fraction:
    """Max of (e(B)-e(S))/(v(B)-v(S)) over every subgraph B with S ⊂ B ⊆ F, v(B) > v(S)."""
    sv = set(S.vertices)
    free = [v for v in F.vertices if v not in sv]
    best = None
    for k in range(1, len(free) + 1):
        for extra in itertools.combinations(free, k):
            verts = sv | set(extra)
            avail = [e for e in F.iter_edges() if e[0] in verts and e[1] in verts and not S.has_edge(*e)]
            # enumerate edge subsets too when there are few of them
            subsets = [avail] if len(avail) > 8 else [
                list(c) for r in range(len(avail) + 1) for c in itertools.combinations(avail, r)
            ]
            for sub in subsets:
                val = Fraction(len(sub), k)
                if best is None or val > best:
                    best = val
    return best


def brute_two_density(G: Graph) -> Fraction:
    best = None
    for k in range(3, G.n + 1):
        for vs in itertools.combinations(G.vertices, k):
            val = Fraction(G.induced(vs).m - 1, k - 2)
            best = val if best is None else max(best, val)
    return best


@settings(max_examples=200, deadline=None)
@given(graphs(min_n=3, max_n=8), st.data())
def test_rho_max_matches_brute_force(F, data):
    u, v = data.draw(st.sampled_from(list(itertools.combinations(F.vertices, 2))))
    S = Graph((u, v), [(u, v)] if F.has_edge(u, v) else [])
    val, verts = rho_max(S, F)
    assert val == brute_rho_max(S, F)
    B = F.induced(verts)
    assert Fraction(B.m - S.m, B.n - S.n) == val


def test_rho_max_brute_force_twelve_vertices():
    rng = random.Random(7)
    for _ in range(6):
        F = random_graph(rng, 12, 0.4)
        S = F.induced([0, 1, 2])
        assert rho_max(S, F)[0] == brute_rho_max(S, F)


def test_rho_max_tie_break_smallest_then_lexicographic():
    # two disjoint triangles hanging off the same edge: both give 2 per vertex
    F = Graph(range(6), [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (4, 5)])
    val, verts = rho_max(edge_graph((0, 1)), F)
    assert val == 2 and verts == frozenset({0, 1, 2})


def test_rho_max_errors():
    with pytest.raises(ContainmentError):
        rho_max(complete_graph(3), Graph(range(3), [(0, 1)]))
    with pytest.raises(DegeneratePairError):
        rho_max(complete_graph(3), complete_graph(3))
    with pytest.raises(SizeError):
        rho_max(Graph((0, 1), [(0, 1)]), complete_graph(27))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_composition_of_incremental_densities(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 10)
    C = random_graph(rng, n, rng.random())
    b = rng.randint(1, n - 1)
    a = rng.randint(0, b - 1)
    Bv = list(range(b))
    Av = list(range(a))
    keep = [e for e in C.induced(Bv).edges() if rng.random() < 0.8]
    B = Graph(Bv, keep)
    A = Graph(Av, [e for e in B.edges() if e[1] < a and rng.random() < 0.8])
    C = C.without_edges([e for e in C.induced(Bv).edges() if not B.has_edge(*e)])
    alpha = Fraction(rng.randint(0, 12), rng.randint(1, 4))
    ab, bc, ac = rho_pair(A, B), rho_pair(B, C), rho_pair(A, C)
    if ab >= alpha and bc >= alpha:
        assert ac >= alpha
    if ab < alpha and bc < alpha:
        assert ac < alpha


@settings(max_examples=150, deadline=None)
@given(graphs(min_n=3, max_n=9))
def test_two_density_brute_force(G):
    assert two_density(G) == brute_two_density(G)


@pytest.mark.parametrize("r", range(3, 9))
def test_lambda_of_cliques(r):
    assert lam(complete_graph(r)) == Fraction(r * (r - 1) // 2 - 2, r - 2)


def test_lambda_star_equals_lambda_on_balanced_graphs():
    for H in [complete_graph(4), complete_graph(5), complete_graph(6), cycle(5), cycle(6), complete_bipartite(3, 3)]:
        assert is_balanced(H) != Balance.UNBALANCED
        assert lambda_star(H) == lam(H)
    H = complete_bipartite(2, 4)
    assert is_balanced(H) == Balance.UNBALANCED
    assert lambda_star(H) < lam(H)


@settings(max_examples=150, deadline=None)
@given(graphs(min_n=4, max_n=8))
def test_lambda_star_at_most_lambda(H):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        H = H.induced(v for v in H.vertices if H.degree(v) > 0)
        if H.n < 4:
            return
        ls, lm, bal = lambda_star(H), lam(H), is_balanced(H)
    assert ls <= lm
    assert (ls == lm) == (bal != Balance.UNBALANCED)


def test_balance_classes():
    assert is_balanced(complete_graph(4)) == Balance.BALANCED
    assert is_balanced(complete_graph(5)) == Balance.STRICT
    assert is_balanced(cycle(6)) == Balance.BALANCED
    assert is_balanced(paw()) == Balance.UNBALANCED


def test_beta_values():
    b, fam = beta(paw())
    assert b == Fraction(3, 4)
    # removing a triangle edge leaves either a star or a path, both at 3/4
    assert len(fam) == 2 and all(F.m == 3 for F in fam)
    assert beta(star(3))[0] == Fraction(2, 3)
    assert beta(path(4))[0] == Fraction(1, 2)
    with pytest.raises(PreconditionError):
        beta(complete_graph(4))


def test_max_density():
    assert max_density(complete_graph(4)) == Fraction(3, 2)
    assert max_density(Graph(range(3))) == 0


def test_isolated_vertices_warn_and_drop():
    H = complete_graph(4).with_edges([], [9])
    with pytest.warns(UserWarning):
        assert lam(H) == 2
