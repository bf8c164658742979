import random
from fractions import Fraction

import pytest

from percolab.analysis import (
    RhoCertificate,
    activates,
    alpha_core,
    is_alpha_dense,
    is_alpha_sparse,
    ladder,
    modified_core,
    rho_exact_special,
    rho_upper_bound,
    tree_parameter,
)
from percolab.density import lam
from percolab.dynamics import WGA
from percolab.errors import PreconditionError, ValidationError
from percolab.graph import Graph, complete_graph
from percolab.patterns import complete_bipartite, cycle, paw, path, star

from conftest import oracle_core_vertices, oracle_dense_sets, random_graph


def random_instance(rng: random.Random, max_n=12):
    n = rng.randint(3, max_n)
    A = random_graph(rng, n, rng.uniform(0.2, 0.8))
    e = tuple(sorted(rng.sample(range(n), 2)))
    alpha = Fraction(rng.randint(2, 12), rng.randint(2, 4))
    return e, A, alpha


def test_alpha_core_matches_oracle():
    rng = random.Random(3)
    for _ in range(150):
        e, A, alpha = random_instance(rng, 10)
        res = alpha_core(e, A, alpha)
        assert frozenset(res.core.vertices) == oracle_core_vertices(e, A, alpha)
        assert res.dense_pair_ok


def test_is_alpha_dense_matches_oracle():
    rng = random.Random(4)
    for _ in range(150):
        e, A, alpha = random_instance(rng, 9)
        F = A.with_edges([e])
        dense, free = oracle_dense_sets(e, F, alpha)
        full = (1 << len(free)) - 1
        expect = full in dense or not free
        ok, bad = is_alpha_dense(e, F, alpha)
        assert ok == expect
        if not ok:
            lost = F.m - bad.m
            assert lost * alpha.denominator < alpha.numerator * (F.n - bad.n)


def test_union_of_dense_pairs_is_dense():
    rng = random.Random(5)
    checked = 0
    while checked < 100:
        e, A, alpha = random_instance(rng, 10)
        F = A.with_edges([e])
        dense, free = oracle_dense_sets(e, F, alpha)
        if len(dense) < 2:
            continue
        X, Y = rng.sample(dense, 2)
        F1 = F.induced(list(e) + [free[i] for i in range(len(free)) if X >> i & 1])
        F2 = F.induced(list(e) + [free[i] for i in range(len(free)) if Y >> i & 1])
        assert is_alpha_dense(e, F1.union(F2), alpha)[0]
        checked += 1


def test_core_is_sparse_boundary():
    rng = random.Random(6)
    for _ in range(150):
        e, A, alpha = random_instance(rng, 10)
        res = alpha_core(e, A, alpha)
        Ae = A.with_edges([e])
        core = res.core.with_edges([e]) if res.certificate is not None else Graph(e, [e])
        assert is_alpha_sparse(core, Ae, alpha)[0]


def test_alpha_examples():
    K4 = complete_graph(4)
    assert is_alpha_dense((0, 1), K4, Fraction(2))[0]
    assert not is_alpha_dense((0, 1), K4, Fraction(3))[0]
    core = alpha_core((0, 1), K4.without_edges([(0, 1)]), Fraction(2))
    assert core.core.n == 4
    assert alpha_core((0, 4), path(5), Fraction(2)).core.n == 2
    assert is_alpha_sparse(Graph((0, 1), [(0, 1)]), path(5), Fraction(2))[0]
    with pytest.raises(ValidationError):
        is_alpha_dense((0, 9), K4, Fraction(1))


def test_modified_core_is_union_over_completing_copy():
    H = complete_graph(3)
    wga = WGA(H, path(4))
    M = modified_core((0, 3), wga, Fraction(1))
    gs = wga.completing_edges((0, 3))
    assert set(gs) <= set(M.edge_set()) | {g for g in gs if not wga.is_black(g)}
    with pytest.raises(PreconditionError):
        modified_core((0, 1), wga, Fraction(1))


# certificates ------------------------------------------------------------


@pytest.mark.parametrize("r", [4, 5, 6])
@pytest.mark.parametrize("h", [1, 2, 3, 4, 5, 6])
def test_clique_ladders(r, h):
    H = complete_graph(r)
    cert = ladder(H, (0, 1), h)
    assert cert.bound == lam(H) + Fraction(1, h * (r - 2))
    assert cert.A.n == h * (r - 2) + 2
    assert activates(H, cert.A, cert.e)


def test_k6_ladder_of_height_three():
    cert = ladder(complete_graph(6), (0, 1), 3)
    assert (cert.A.n, cert.A.m) == (14, 40)


def test_balanced_ladders_report_true_value():
    for H in [cycle(5), complete_bipartite(3, 3)]:
        for h in (1, 2, 3):
            cert = ladder(H, H.edges()[0], h)
            closed = lam(H) + Fraction(1, h * (H.n - 2))
            assert activates(H, cert.A, cert.e)
            assert cert.bound <= max(closed, Fraction(H.m - 1, H.n - 2))


def test_certificate_json_round_trip():
    cert = ladder(complete_graph(4), (0, 1), 2)
    back = RhoCertificate.from_json(cert.to_json())
    assert back.e == cert.e and back.A == cert.A and back.bound == cert.bound


@pytest.mark.parametrize(
    "H, value",
    [
        (complete_graph(4), Fraction(2)),
        (complete_graph(5), Fraction(8, 3)),
        (paw(), Fraction(3, 4)),
        (path(4), Fraction(1, 2)),
        (star(3), Fraction(2, 3)),
        (complete_graph(2), Fraction(0)),
    ]
    + [(cycle(m), Fraction(1)) for m in range(3, 13)],
)
def test_rho_exact_special(H, value):
    assert rho_exact_special(H)[0] == value


def test_rho_exact_special_unknown():
    assert rho_exact_special(complete_bipartite(2, 4)) is None


def test_tree_parameter():
    assert tree_parameter(paw()) == 3
    assert tree_parameter(cycle(6)) == 5


@pytest.mark.parametrize("H", [complete_graph(4), paw(), cycle(5), complete_graph(3)])
def test_upper_bound_dominates_exact_value(H):
    cert = rho_upper_bound(H, max_copies=3)
    assert activates(H, cert.A, cert.e)
    assert cert.bound >= rho_exact_special(H)[0]


def test_upper_bound_gap_shrinks_with_budget():
    H = cycle(5)
    bounds = [rho_upper_bound(H, max_copies=k).bound for k in (1, 2, 3)]
    assert bounds[0] >= bounds[1] >= bounds[2] >= 1
    assert bounds[2] < bounds[0]


def test_k24_certificate_at_small_budget():
    cert = rho_upper_bound(complete_bipartite(2, 4), max_copies=2)
    assert cert.bound <= Fraction(3, 2) + Fraction(1, 4)
    assert activates(complete_bipartite(2, 4), cert.A, cert.e)
