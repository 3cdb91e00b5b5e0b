"""Disagreement-vertex configurations and the extremal-configuration metric.

For two colorings that differ at a single vertex v, each color c induces a
profile of component sizes around v (one ``a`` and one ``b`` entry per
neighbor of v holding c).  Four profiles are extremal: (2;1), (1;2) of
order 1 and (3,3;1,1), (1,1;3,3) of order 2.  The metric down-weights
Hamming edges whose endpoint pair shows few extremal colors.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .graphs import Coloring, Graph, ListAssignment, all_colorings, encode_coloring
from .kempe import component, is_flippable


class MetricError(ValueError):
    """Invalid pair, parameter range, or state-space cap violation."""


def hamming(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(1 for a, b in zip(x, y) if a != b)


@dataclass(frozen=True)
class AdjacentPair:
    """Two colorings differing at exactly one vertex."""

    sigma: Coloring
    tau: Coloring
    v: int

    @classmethod
    def from_colorings(cls, sigma: Sequence[int], tau: Sequence[int]) -> "AdjacentPair":
        if len(sigma) != len(tau):
            raise MetricError("colorings have different lengths")
        diff = [u for u, (a, b) in enumerate(zip(sigma, tau)) if a != b]
        if len(diff) != 1:
            raise MetricError(f"pair differs at {len(diff)} vertices, need exactly 1")
        return cls(tuple(sigma), tuple(tau), diff[0])

    def swapped(self) -> "AdjacentPair":
        return AdjacentPair(self.tau, self.sigma, self.v)


class Extremality(Enum):
    NONE = "none"
    EXT1 = "ext1"
    EXT2 = "ext2"


@dataclass(frozen=True)
class Configuration:
    """Component-size profile of one color at the disagreement vertex.

    ``a[i]`` is the size of the component of neighbor w_i toward sigma(v) in
    tau, ``b[i]`` the size toward tau(v) in sigma; repeated components are
    zeroed after their first occurrence, and in list mode so are entries of
    non-flippable components.  ``a_total``/``b_total`` are 1 + sum of the
    entries, or 0 in list mode when the component through v itself cannot
    flip.
    """

    color: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    a_total: int
    b_total: int
    neighbors: tuple[int, ...]
    list_mode: bool = False

    @property
    def r(self) -> int:
        return len(self.a)

    @property
    def a_max(self) -> int:
        return max(self.a) if self.a else 0

    @property
    def b_max(self) -> int:
        return max(self.b) if self.b else 0

    @property
    def i_a(self) -> int | None:
        return self.a.index(self.a_max) if self.a else None

    @property
    def i_b(self) -> int | None:
        return self.b.index(self.b_max) if self.b else None


def _profile_side(
    g: Graph,
    base: Sequence[int],
    neighbors: Sequence[int],
    other_color: int,
    lists: ListAssignment | None,
) -> tuple[int, ...]:
    """Sizes of the neighbors' components in ``base`` toward ``other_color``.

    A component shared by several neighbors keeps its size at the first
    occurrence only; in list mode non-flippable components are zeroed.
    """
    sizes = []
    seen_keys = set()
    for w in neighbors:
        comp = component(g, base, w, other_color)
        if comp.key in seen_keys:
            sizes.append(0)
            continue
        seen_keys.add(comp.key)
        if lists is not None and not is_flippable(lists, comp):
            sizes.append(0)
        else:
            sizes.append(comp.size)
    return tuple(sizes)


def configuration(
    g: Graph,
    pair: AdjacentPair,
    c: int,
    lists: ListAssignment | None = None,
) -> Configuration:
    """Profile of color ``c`` for the pair, with all zeroing rules applied."""
    sigma, tau, v = pair.sigma, pair.tau, pair.v
    neighbors = tuple(w for w in g.adjacency[v] if sigma[w] == c)
    a = _profile_side(g, tau, neighbors, sigma[v], lists)
    b = _profile_side(g, sigma, neighbors, tau[v], lists)
    if lists is None:
        a_total = 1 + sum(a)
        b_total = 1 + sum(b)
    else:
        comp_sv = component(g, sigma, v, c)
        comp_tv = component(g, tau, v, c)
        a_total = 1 + sum(a) if is_flippable(lists, comp_sv) else 0
        b_total = 1 + sum(b) if is_flippable(lists, comp_tv) else 0
    return Configuration(
        color=c,
        a=a,
        b=b,
        a_total=a_total,
        b_total=b_total,
        neighbors=neighbors,
        list_mode=lists is not None,
    )


_EXT1 = {((2,), (1,)), ((1,), (2,))}
_EXT2 = {((3, 3), (1, 1)), ((1, 1), (3, 3))}


def classify(conf: Configuration) -> Extremality:
    ab = (conf.a, conf.b)
    if ab in _EXT1:
        return Extremality.EXT1
    if ab in _EXT2:
        return Extremality.EXT2
    return Extremality.NONE


def extremal_colors(
    g: Graph,
    pair: AdjacentPair,
    lists: ListAssignment | None = None,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Colors with order-1 and order-2 extremal configurations for the pair.

    Only colors present in the neighborhood of v can be extremal, so the
    scan is restricted to them.
    """
    ext1, ext2 = [], []
    seen = set()
    for w in g.adjacency[pair.v]:
        c = pair.sigma[w]
        if c in seen:
            continue
        seen.add(c)
        cls = classify(configuration(g, pair, c, lists))
        if cls is Extremality.EXT1:
            ext1.append(c)
        elif cls is Extremality.EXT2:
            ext2.append(c)
    return tuple(sorted(ext1)), tuple(sorted(ext2))


def beta(
    g: Graph,
    pair: AdjacentPair,
    lists: ListAssignment | None = None,
) -> Fraction:
    """Fraction of v's neighbor capacity engaged in extremal configurations."""
    delta = g.max_degree
    if delta == 0:
        return Fraction(0)
    ext1, ext2 = extremal_colors(g, pair, lists)
    return Fraction(len(ext1) + 2 * len(ext2), delta)


def omega(
    g: Graph,
    pair: AdjacentPair,
    gamma: Fraction,
    lists: ListAssignment | None = None,
) -> Fraction:
    """Edge weight 1 - gamma * (1 - beta) of the deformed adjacency graph."""
    gamma = Fraction(gamma)
    if not 0 < gamma < Fraction(1, 2):
        raise MetricError("gamma must lie strictly between 0 and 1/2")
    return 1 - gamma * (1 - beta(g, pair, lists))


class ExactMetric:
    """Shortest-path metric on all colorings under the deformed edge weights.

    Edges connect colorings at Hamming distance one; weights are omega.
    Distances are exact rationals via Dijkstra with lexicographic
    tie-breaking on encoded states.
    """

    def __init__(self, g: Graph, k: int, gamma, cap: int = 10**6):
        gamma = Fraction(gamma)
        if not 0 < gamma < Fraction(1, 2):
            raise MetricError("gamma must lie strictly between 0 and 1/2")
        if k**g.n > cap:
            raise MetricError(f"state space {k**g.n} exceeds cap {cap}")
        self.g = g
        self.k = k
        self.gamma = gamma
        self._weights: dict[tuple[Coloring, Coloring], Fraction] = {}
        self._dist_maps: dict[Coloring, dict[Coloring, Fraction]] = {}

    def edge_weight(self, x: Coloring, y: Coloring) -> Fraction:
        key = (x, y) if x <= y else (y, x)
        w = self._weights.get(key)
        if w is None:
            pair = AdjacentPair.from_colorings(*key)
            w = omega(self.g, pair, self.gamma)
            self._weights[key] = w
        return w

    def _neighbors(self, x: Coloring):
        for u in range(self.g.n):
            for c in range(self.k):
                if c != x[u]:
                    y = list(x)
                    y[u] = c
                    yield tuple(y)

    def distances_from(self, source: Coloring) -> dict[Coloring, Fraction]:
        cached = self._dist_maps.get(source)
        if cached is not None:
            return cached
        dist: dict[Coloring, Fraction] = {source: Fraction(0)}
        done: set[Coloring] = set()
        heap = [(Fraction(0), encode_coloring(source, self.k), source)]
        while heap:
            d, _, x = heapq.heappop(heap)
            if x in done:
                continue
            done.add(x)
            for y in self._neighbors(x):
                nd = d + self.edge_weight(x, y)
                if y not in dist or nd < dist[y]:
                    dist[y] = nd
                    heapq.heappush(heap, (nd, encode_coloring(y, self.k), y))
        self._dist_maps[source] = dist
        return dist

    def distance(self, x: Coloring, y: Coloring) -> Fraction:
        x, y = tuple(x), tuple(y)
        if x == y:
            return Fraction(0)
        if x in self._dist_maps:
            return self._dist_maps[x][y]
        if y in self._dist_maps:
            return self._dist_maps[y][x]
        return self.distances_from(x)[y]

    def d_b(self, x: Coloring, y: Coloring) -> Fraction:
        """Hamming distance minus the deformed distance; non-negative."""
        return hamming(x, y) - self.distance(x, y)


def exact_distance(
    g: Graph, k: int, gamma, x: Sequence[int], y: Sequence[int], cap: int = 10**6
) -> Fraction:
    return ExactMetric(g, k, gamma, cap).distance(tuple(x), tuple(y))


def d_b(
    g: Graph, k: int, gamma, x: Sequence[int], y: Sequence[int], cap: int = 10**6
) -> Fraction:
    return ExactMetric(g, k, gamma, cap).d_b(tuple(x), tuple(y))
