"""Shared builders for the test battery: small structures over the built-in
languages, deterministic fixture pools, and grids.

Metric tables drawn from value sets inside a factor-2 band satisfy the
triangle inequality automatically (a <= b + c whenever max <= 2 * min), so
random tables over such bands need no repair pass.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from efd.lang import fixture
from efd.structures import FiniteStructure

F = Fraction

METRIC = fixture("metric")
GRAPH = fixture("graph")
CHAIN = fixture("chain")


def metric_space(prefix: str, dists: dict[tuple[int, int], Fraction],
                 n: int, name: str = "") -> FiniteStructure:
    """n points; dists maps index pairs (i < j) to distances."""
    ids = tuple(f"{prefix}{i + 1}" for i in range(n))
    table: dict[tuple[str, str], Fraction] = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                table[(ids[i], ids[j])] = F(0)
            else:
                lo, hi = min(i, j), max(i, j)
                table[(ids[i], ids[j])] = dists[(lo, hi)]
    return FiniteStructure(language=METRIC, universes={"M": ids},
                           metric={"M": table}, relations={}, functions={},
                           constants={}, name=name or f"{prefix}{n}")


def graph_structure(prefix: str, n: int, dists: dict[tuple[int, int], Fraction],
                    edges: dict[tuple[int, int], Fraction],
                    name: str = "") -> FiniteStructure:
    """n vertices over the graph language; edges maps ordered index pairs to
    E-values (missing pairs default to 0)."""
    ids = tuple(f"{prefix}{i + 1}" for i in range(n))
    table: dict[tuple[str, str], Fraction] = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                table[(ids[i], ids[j])] = F(0)
            else:
                lo, hi = min(i, j), max(i, j)
                table[(ids[i], ids[j])] = dists[(lo, hi)]
    rel = {}
    for i in range(n):
        for j in range(n):
            rel[(ids[i], ids[j])] = edges.get((i, j), F(0))
    return FiniteStructure(language=GRAPH, universes={"V": ids},
                           metric={"V": table}, relations={"E": rel},
                           functions={}, constants={}, name=name or f"{prefix}{n}")


def chain_structure(n: int, prefix: str = "c") -> FiniteStructure:
    """A linear order of n points: discrete metric, le(ci, cj) = 1 iff i <= j."""
    ids = tuple(f"{prefix}{i + 1}" for i in range(n))
    table = {(x, y): F(0) if x == y else F(1) for x in ids for y in ids}
    rel = {(ids[i], ids[j]): F(1) if i <= j else F(0)
           for i in range(n) for j in range(n)}
    return FiniteStructure(language=CHAIN, universes={"C": ids},
                           metric={"C": table}, relations={"le": rel},
                           functions={}, constants={}, name=f"chain{n}")


def two_point_pair() -> tuple[FiniteStructure, FiniteStructure]:
    """The hand-derived pair: two points at distance 1 vs at distance 3/2."""
    a = metric_space("a", {(0, 1): F(1)}, 2, name="two_pt_1")
    b = metric_space("b", {(0, 1): F(3, 2)}, 2, name="two_pt_32")
    return a, b


def random_metric(rng: random.Random, prefix: str, n: int,
                  values=(F(1), F(5, 4), F(3, 2), F(2))) -> FiniteStructure:
    dists = {(i, j): rng.choice(values)
             for i in range(n) for j in range(i + 1, n)}
    return metric_space(prefix, dists, n)


def random_graph(rng: random.Random, prefix: str, n: int) -> FiniteStructure:
    dists = {(i, j): rng.choice((F(1, 2), F(1)))
             for i in range(n) for j in range(i + 1, n)}
    edges = {}
    for i in range(n):
        for j in range(n):
            edges[(i, j)] = rng.choice((F(0), F(1, 2), F(1)))
    return graph_structure(prefix, n, dists, edges)


def fixture_pool() -> list[tuple[str, FiniteStructure, FiniteStructure]]:
    """Deterministic same-language pairs across the three plain languages,
    each structure on at most 3 points.  Used by the acceptance suites."""
    rng = random.Random(20260822)
    metric_pool = [
        metric_space("p", {}, 1, name="one_pt"),
        *two_point_pair(),
        metric_space("u", {(0, 1): F(1), (0, 2): F(1), (1, 2): F(1)}, 3,
                     name="equilateral"),
        random_metric(rng, "q", 3),
        random_metric(rng, "s", 3),
    ]
    graph_pool = [
        graph_structure("g", 1, {}, {}),
        graph_structure("g", 2, {(0, 1): F(1)}, {(0, 1): F(1), (1, 0): F(1)}),
        graph_structure("h", 2, {(0, 1): F(1)}, {(0, 1): F(1, 2)}),
        random_graph(rng, "j", 3),
        random_graph(rng, "k", 3),
    ]
    chain_pool = [chain_structure(n) for n in (1, 2, 3)]
    pairs = []
    for tag, pool in (("metric", metric_pool), ("graph", graph_pool),
                      ("chain", chain_pool)):
        for a, b in itertools.product(pool, repeat=2):
            pairs.append((tag, a, b))
    return pairs


def scott_grid() -> list[FiniteStructure]:
    """Every pure-metric structure on 1..3 points whose pairwise distances
    come from the half-integer grid in (0, 2] and satisfy the triangle
    inequality.  Exhaustive by construction."""
    values = (F(1, 2), F(1), F(3, 2), F(2))
    out = [metric_space("x", {}, 1)]
    for d in values:
        out.append(metric_space("x", {(0, 1): d}, 2))
    for d01, d02, d12 in itertools.product(values, repeat=3):
        if d01 > d02 + d12 or d02 > d01 + d12 or d12 > d01 + d02:
            continue
        out.append(metric_space("x", {(0, 1): d01, (0, 2): d02, (1, 2): d12}, 3))
    return out
