"""G(n, p) sampling, the random graph process and Monte Carlo threshold estimates.

Seeding: trial ``i`` of an experiment with master seed ``s`` draws from
``PCG64(SeedSequence([s, crc32(stream), i]))`` where ``stream`` names the
experiment.  Results therefore do not depend on how trials are spread over
worker processes.  All logarithms are natural.
"""

from __future__ import annotations

import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .dynamics import percolates
from .embed import contains
from .errors import PreconditionError, ValidationError
from .graph import Graph

MAX_PROBES = 40


def trial_rng(seed: int, stream: str, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), zlib.crc32(stream.encode()), int(index)])
    return np.random.Generator(np.random.PCG64(ss))


@lru_cache(maxsize=8)
def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(n, 1)
    return iu.astype(np.int32), ju.astype(np.int32)


def graph_from_pairs(n: int, us: np.ndarray, vs: np.ndarray) -> Graph:
    """Trusted construction from distinct pairs with ``u < v``."""
    if len(us) == 0:
        return Graph._raw(tuple(range(n)), {i: frozenset() for i in range(n)}, 0)
    src = np.concatenate([us, vs])
    dst = np.concatenate([vs, us])
    order = np.argsort(src, kind="stable")
    src, dst = src[order], dst[order]
    cuts = np.searchsorted(src, np.arange(n + 1))
    dl = dst.tolist()
    adj = {i: frozenset(dl[cuts[i] : cuts[i + 1]]) for i in range(n)}
    return Graph._raw(tuple(range(n)), adj, len(us))


def _check_p(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise ValidationError(f"p = {p} is outside [0, 1]")


def pair_uniforms(n: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform per pair of ``K_n`` (row-major upper triangle)."""
    return rng.random(n * (n - 1) // 2)


def coupled_graph(n: int, uniforms: np.ndarray, p: float) -> Graph:
    iu, ju = _pairs(n)
    m = uniforms < p
    return graph_from_pairs(n, iu[m], ju[m])


def sample_gnp(n: int, p: float, seed: int | None = None, rng: np.random.Generator | None = None) -> Graph:
    """``G(n, p)`` on ``range(n)``, reproducible from ``seed`` (or an explicit generator)."""
    _check_p(p)
    if rng is None:
        rng = trial_rng(0 if seed is None else seed, "gnp", 0)
    if n < 2:
        return Graph(range(n))
    return coupled_graph(n, pair_uniforms(n, rng), p)


# ---------------------------------------------------------------------------
# the random graph process


@dataclass
class ProcessTrace:
    """A uniformly random ordering of the pairs of ``K_n``."""

    n: int
    order: np.ndarray
    seed: int

    @classmethod
    def sample(cls, n: int, seed: int, index: int = 0) -> ProcessTrace:
        rng = trial_rng(seed, "process", index)
        return cls(n, rng.permutation(n * (n - 1) // 2), seed)

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[tuple[int, int]], seed: int = 0) -> ProcessTrace:
        """Trace with an explicit pair order (must list every pair once)."""
        iu, ju = _pairs(n)
        idx = {(int(a), int(b)): k for k, (a, b) in enumerate(zip(iu, ju))}
        order = np.array([idx[(min(u, v), max(u, v))] for u, v in edges], dtype=np.int64)
        if len(order) != len(iu) or len(set(order.tolist())) != len(iu):
            raise ValidationError("edge order must be a permutation of all pairs")
        return cls(n, order, seed)

    @property
    def length(self) -> int:
        return len(self.order)

    def graph_at(self, m: int) -> Graph:
        iu, ju = _pairs(self.n)
        sel = self.order[:m]
        return graph_from_pairs(self.n, iu[sel], ju[sel])

    def edge_at(self, m: int) -> tuple[int, int]:
        """The ``m``-th added pair (1-based)."""
        iu, ju = _pairs(self.n)
        k = self.order[m - 1]
        return int(iu[k]), int(ju[k])


class Property:
    """A graph predicate; ``monotone`` marks it increasing under adding edges."""

    monotone = False
    name = "property"

    def __call__(self, G: Graph) -> bool:
        raise NotImplementedError


class Percolates(Property):
    monotone = True

    def __init__(self, H: Graph):
        self.H = H
        self.name = "percolates"

    def __call__(self, G: Graph) -> bool:
        return percolates(self.H, G)


class Connected(Property):
    monotone = True
    name = "connected"

    def __call__(self, G: Graph) -> bool:
        return G.is_connected()


class MinDegreeAtLeast(Property):
    monotone = True

    def __init__(self, k: int):
        self.k = k
        self.name = f"min-degree>={k}"

    def __call__(self, G: Graph) -> bool:
        return G.n == 0 or G.min_degree() >= self.k


class ContainsAny(Property):
    monotone = True

    def __init__(self, family: Iterable[Graph]):
        self.family = list(family)
        self.name = "contains-any"

    def __call__(self, G: Graph) -> bool:
        return any(contains(F, G) for F in self.family)


class Predicate(Property):
    """Wraps a plain callable; monotonicity must be declared by the caller."""

    def __init__(self, fn: Callable[[Graph], bool], monotone: bool = False, name: str = "predicate"):
        self.fn = fn
        self.monotone = monotone
        self.name = name

    def __call__(self, G: Graph) -> bool:
        return bool(self.fn(G))


def hitting_time(trace: ProcessTrace, prop: Property) -> int | None:
    """Smallest ``m`` with ``prop(G_m)``, by binary search; ``None`` if never."""
    if not getattr(prop, "monotone", False):
        raise PreconditionError(f"property {getattr(prop, 'name', prop)!r} is not declared monotone")
    hi = trace.length
    if not prop(trace.graph_at(hi)):
        return None
    lo = 0
    if prop(trace.graph_at(0)):
        return 0
    # prop false at lo, true at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if prop(trace.graph_at(mid)):
            hi = mid
        else:
            lo = mid
    return hi


def hitting_time_linear(trace: ProcessTrace, prop: Property) -> int | None:
    for m in range(trace.length + 1):
        if prop(trace.graph_at(m)):
            return m
    return None


# ---------------------------------------------------------------------------
# confidence intervals and parallel map


def wilson(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    ph = k / n
    den = 1 + z * z / n
    c = (ph + z * z / (2 * n)) / den
    h = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    return max(0.0, c - h), min(1.0, c + h)


def resolve_threads(threads: int | None) -> int:
    if threads:
        return max(1, int(threads))
    env = os.environ.get("PERCOLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"PERCOLAB_THREADS={env!r} is not an integer")
    return os.cpu_count() or 1


def _pmap(fn, args: list, threads: int | None) -> list:
    workers = resolve_threads(threads)
    if workers <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=min(workers, len(args))) as ex:
        return list(ex.map(fn, *zip(*args), chunksize=max(1, len(args) // (4 * workers))))


def _pattern_key(H: Graph) -> tuple:
    return H.vertices, tuple(H.edges())


def _pattern(key: tuple) -> Graph:
    return Graph(key[0], key[1])


def _coupled_trial(hkey: tuple, n: int, seed: int, stream: str, index: int, p: float) -> bool:
    rng = trial_rng(seed, stream, index)
    return percolates(_pattern(hkey), coupled_graph(n, pair_uniforms(n, rng), p))


def _fresh_trial(hkey: tuple, n: int, seed: int, stream: str, index: int, p: float) -> bool:
    rng = trial_rng(seed, stream, index)
    return percolates(_pattern(hkey), sample_gnp(n, p, rng=rng))


def coupled_curve(H: Graph, n: int, seed: int, index: int, ps: Sequence[float], stream: str = "pc") -> list[bool]:
    """Percolation of one coupled trial at each ``p`` in ``ps``."""
    u = pair_uniforms(n, trial_rng(seed, stream, index))
    return [percolates(H, coupled_graph(n, u, p)) for p in ps]


# ---------------------------------------------------------------------------
# threshold estimates


@dataclass
class PcEstimate:
    p_hat: float
    trials: int
    bracket: tuple[float, float]
    probes: list[dict] = field(default_factory=list)
    level: float = 0.5
    n: int = 0
    seed: int = 0
    coupled: bool = True

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "level": self.level,
            "p_hat": self.p_hat,
            "p_low": self.bracket[0],
            "p_high": self.bracket[1],
            "trials": self.trials,
            "coupled": self.coupled,
            "seed": self.seed,
            "probes": self.probes,
        }


def estimate_p_eps(
    H: Graph,
    n: int,
    eps: float,
    trials: int,
    seed: int,
    rel_tol: float = 0.05,
    coupled: bool = True,
    threads: int | None = None,
    max_probes: int = MAX_PROBES,
) -> PcEstimate:
    """Geometric bisection on ``p`` for the level-``eps`` percolation probability.

    The bracket starts at ``[n^-2, 1]``; each probe runs ``trials`` samples
    and moves the upper end down when the empirical frequency reaches
    ``eps``.  With coupling, trial ``i`` uses the same pair uniforms at every
    probe, and a trial known to percolate at ``p' <= p`` (or fail at
    ``p' >= p``) is not re-run.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if not (0 < eps < 1):
        raise ValidationError("eps must lie strictly between 0 and 1")
    lo, hi = float(n) ** -2, 1.0
    hkey = _pattern_key(H)
    known_yes = [math.inf] * trials  # smallest p seen percolating
    known_no = [-math.inf] * trials  # largest p seen failing
    probes: list[dict] = []
    for k in range(max_probes):
        mid = math.sqrt(lo * hi)
        if hi - lo <= rel_tol * mid:
            break
        p = mid
        if coupled:
            todo = [i for i in range(trials) if not (known_yes[i] <= p or known_no[i] >= p)]
            got = _pmap(_coupled_trial, [(hkey, n, seed, "pc", i, p) for i in todo], threads)
            for i, ok in zip(todo, got):
                if ok:
                    known_yes[i] = min(known_yes[i], p)
                else:
                    known_no[i] = max(known_no[i], p)
            hits = sum(1 for i in range(trials) if known_yes[i] <= p)
        else:
            got = _pmap(_fresh_trial, [(hkey, n, seed, f"pc-probe-{k}", i, p) for i in range(trials)], threads)
            hits = sum(got)
        freq = hits / trials
        lo_ci, hi_ci = wilson(hits, trials)
        probes.append({"p": p, "frequency": freq, "ci_low": lo_ci, "ci_high": hi_ci})
        if freq >= eps:
            hi = p
        else:
            lo = p
    return PcEstimate(math.sqrt(lo * hi), trials, (lo, hi), probes, eps, n, seed, coupled)


def estimate_pc(
    H: Graph,
    n: int,
    trials: int,
    rel_tol: float = 0.05,
    seed: int = 0,
    coupled: bool = True,
    threads: int | None = None,
) -> PcEstimate:
    return estimate_p_eps(H, n, 0.5, trials, seed, rel_tol, coupled, threads)


def sharpness_report(
    H: Graph,
    ns: Sequence[int],
    eps: float,
    trials: int,
    seed: int,
    rel_tol: float = 0.02,
    threads: int | None = None,
) -> list[dict]:
    """``(p_{1-eps} - p_eps) / p_c`` for each ``n``."""
    if not (0 < eps < 1):
        raise ValidationError("eps must lie strictly between 0 and 1")
    rows = []
    for n in ns:
        low = estimate_p_eps(H, n, min(eps, 1 - eps), trials, seed, rel_tol, threads=threads)
        high = estimate_p_eps(H, n, max(eps, 1 - eps), trials, seed, rel_tol, threads=threads)
        mid = estimate_p_eps(H, n, 0.5, trials, seed, rel_tol, threads=threads)
        ratio = (high.p_hat - low.p_hat) / mid.p_hat
        rows.append(
            {
                "n": n,
                "eps": eps,
                "p_eps": low.p_hat,
                "p_one_minus_eps": high.p_hat,
                "p_c": mid.p_hat,
                "trials": trials,
                "statistic": ratio,
                "seed": seed,
            }
        )
    return rows


def scaling_rows(H: Graph, ns: Sequence[int], rho: Fraction, trials: int, seed: int, rel_tol: float = 0.05, threads: int | None = None) -> list[dict]:
    """``p_hat * n^(1/rho)`` over a grid of ``n`` (data only)."""
    rows = []
    for n in ns:
        est = estimate_pc(H, n, trials, rel_tol, seed, threads=threads)
        rows.append(
            {
                "n": n,
                "p": est.p_hat,
                "trials": trials,
                "statistic": est.p_hat * n ** (1 / float(rho)),
                "ci_low": est.bracket[0] * n ** (1 / float(rho)),
                "ci_high": est.bracket[1] * n ** (1 / float(rho)),
                "seed": seed,
            }
        )
    return rows


def lower_bound_p(rho: Fraction, n: int, eps_param: float) -> tuple[float, bool]:
    """``p`` solving ``n p^rho log^rho n = eps_param``, clipped to ``[0, 1]``."""
    r = float(rho)
    p = (eps_param / (n * math.log(n) ** r)) ** (1 / r)
    if p > 1:
        return 1.0, True
    return p, False


def _plain_trial(hkey: tuple, n: int, seed: int, stream: str, index: int, p: float) -> bool:
    return _fresh_trial(hkey, n, seed, stream, index, p)


def lower_bound_experiment(
    H: Graph,
    rho: Fraction,
    n: int,
    eps_param: float,
    trials: int,
    seed: int,
    threads: int | None = None,
) -> dict:
    """Fraction of ``G(n, p)`` samples that fail to percolate at the lower-bound ``p``."""
    rho = Fraction(rho)
    if rho <= 1:
        raise PreconditionError("the lower-bound experiment needs a certified rho > 1")
    p, clipped = lower_bound_p(rho, n, eps_param)
    hkey = _pattern_key(H)
    got = _pmap(_plain_trial, [(hkey, n, seed, "lower-bound", i, p) for i in range(trials)], threads)
    fails = sum(1 for ok in got if not ok)
    lo, hi = wilson(fails, trials)
    return {
        "n": n,
        "p": p,
        "clipped": clipped,
        "rho": f"{rho.numerator}/{rho.denominator}",
        "eps_param": eps_param,
        "trials": trials,
        "statistic": fails / trials if trials else 0.0,
        "ci_low": lo,
        "ci_high": hi,
        "seed": seed,
    }


def _coincidence_trial(hkey: tuple, n: int, seed: int, mode: str, index: int, family_keys: tuple) -> tuple:
    H = _pattern(hkey)
    trace = ProcessTrace.sample(n, seed, index)
    a = hitting_time(trace, Percolates(H))
    if mode == "connectivity":
        b = hitting_time(trace, Connected())
    else:
        b = hitting_time(trace, ContainsAny([_pattern(k) for k in family_keys]))
    return a, b


def hitting_coincidence(
    H: Graph,
    n: int,
    trials: int,
    mode: str,
    seed: int,
    threads: int | None = None,
) -> dict:
    """Compare the percolation hitting time with connectivity or with the
    first copy of a minimizing ``H - e`` (leaf family) on random processes."""
    from .analysis import rho_exact_special
    from .density import beta, strip_isolated

    H = strip_isolated(H, "hitting_coincidence")
    if mode == "connectivity":
        ex = rho_exact_special(H)
        if ex is None or ex[0] != 1 or H.min_degree() < 2:
            raise PreconditionError("connectivity mode needs rho(H) = 1 and minimum degree 2")
        fam: tuple = ()
    elif mode == "leaf-family":
        if not any(H.degree(v) == 1 for v in H.vertices):
            raise PreconditionError("leaf-family mode needs H to have a leaf")
        fam = tuple(_pattern_key(F.induced(v for v in F.vertices if F.degree(v) > 0)) for F in beta(H)[1])
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    got = _pmap(_coincidence_trial, [(_pattern_key(H), n, seed, mode, i, fam) for i in range(trials)], threads)
    equal = sum(1 for a, b in got if a == b)
    gaps = [None if a is None or b is None else a - b for a, b in got]
    lo, hi = wilson(equal, trials)
    return {
        "n": n,
        "mode": mode,
        "trials": trials,
        "statistic": equal / trials if trials else 0.0,
        "ci_low": lo,
        "ci_high": hi,
        "seed": seed,
        "gaps": gaps,
        "hitting_times": [[a, b] for a, b in got],
    }
