"""Graphs, colorings, and list assignments, plus deterministic test-graph supply.

Colorings are plain tuples of ints in ``range(k)``; vertices are 0..n-1 and
the fixed vertex order used everywhere is ascending index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np


class GraphError(ValueError):
    """Malformed graph input or infeasible generator request."""


Coloring = tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with sorted adjacency lists."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) has a vertex index >= n = {n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in adj))

    @property
    def max_degree(self) -> int:
        return max((len(nb) for nb in self.adjacency), default=0)

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.adjacency) // 2


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: first line n, then ``u v`` lines, '#' comments."""
    n: int | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError as exc:
                raise GraphError(f"line {lineno}: expected vertex count, got {line!r}") from exc
            if n < 0:
                raise GraphError(f"line {lineno}: negative vertex count")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: malformed edge line {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphError(f"line {lineno}: malformed edge line {line!r}") from exc
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        if not u < v:
            raise GraphError(f"line {lineno}: edges must be written with u < v")
        if not v < n:
            raise GraphError(f"line {lineno}: vertex index {v} >= n = {n}")
        if (u, v) in set(edges):
            raise GraphError(f"line {lineno}: duplicate edge ({u}, {v})")
        edges.append((u, v))
    if n is None:
        raise GraphError("empty graph document")
    return Graph.from_edges(n, edges)


def graph_to_text(g: Graph) -> str:
    lines = [str(g.n)]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def gen_path(n: int) -> Graph:
    if n < 1:
        raise GraphError("paths need at least one vertex")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycles need at least three vertices")
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return Graph.from_edges(n, edges)


def gen_complete(n: int) -> Graph:
    if n < 1:
        raise GraphError("complete graphs need at least one vertex")
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def gen_random_regular(n: int, degree: int, seed: int) -> Graph:
    """Random regular graph via the pairing model, deterministic per seed.

    Pairings producing self-loops or duplicate edges are rejected and the
    whole pairing is retried on a fresh substream.
    """
    if degree < 0 or degree >= n:
        raise GraphError("need 0 <= degree < n")
    if (n * degree) % 2 != 0:
        raise GraphError("n * degree must be even")
    for attempt in range(10_000):
        rng = np.random.Generator(np.random.Philox(key=[seed, attempt]))
        stubs = np.repeat(np.arange(n), degree)
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = int(stubs[i]), int(stubs[i + 1])
            if u == v:
                ok = False
                break
            e = (u, v) if u < v else (v, u)
            if e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return Graph.from_edges(n, sorted(edges))
    raise GraphError("pairing model failed to produce a simple graph")


def validate_coloring(g: Graph, colors: Sequence[int], k: int) -> None:
    if len(colors) != g.n:
        raise GraphError(f"coloring has {len(colors)} entries for {g.n} vertices")
    for u, c in enumerate(colors):
        if not 0 <= c < k:
            raise GraphError(f"vertex {u} has color {c} outside range(0, {k})")


def is_proper(g: Graph, colors: Sequence[int]) -> bool:
    if len(colors) != g.n:
        raise GraphError(f"coloring has {len(colors)} entries for {g.n} vertices")
    for u in range(g.n):
        cu = colors[u]
        for v in g.adjacency[u]:
            if v > u and colors[v] == cu:
                return False
    return True


def proper_colorings(g: Graph, k: int) -> Iterator[Coloring]:
    """All proper k-colorings, by backtracking in vertex order."""
    colors = [0] * g.n

    def extend(u: int) -> Iterator[Coloring]:
        if u == g.n:
            yield tuple(colors)
            return
        blocked = {colors[w] for w in g.adjacency[u] if w < u}
        for c in range(k):
            if c not in blocked:
                colors[u] = c
                yield from extend(u + 1)

    if g.n == 0:
        yield ()
        return
    yield from extend(0)


def count_proper(g: Graph, k: int) -> int:
    return sum(1 for _ in proper_colorings(g, k))


def all_colorings(g: Graph, k: int) -> Iterator[Coloring]:
    yield from itertools.product(range(k), repeat=g.n)


def encode_coloring(colors: Sequence[int], k: int) -> int:
    code = 0
    for c in reversed(colors):
        code = code * k + c
    return code


def automorphisms(g: Graph) -> list[tuple[int, ...]]:
    """All vertex permutations preserving the edge set (brute force)."""
    if g.n > 8:
        raise GraphError("automorphism search is brute force; n <= 8 only")
    edge_set = set(g.edges())
    autos = []
    for perm in itertools.permutations(range(g.n)):
        if all(((perm[u], perm[v]) if perm[u] < perm[v] else (perm[v], perm[u])) in edge_set
               for u, v in edge_set):
            autos.append(perm)
    return autos


def enumerate_nonisomorphic(n: int) -> list[Graph]:
    """All simple graphs on n vertices up to isomorphism (n <= 6)."""
    if n > 6:
        raise GraphError("graph enumeration is brute force; n <= 6 only")
    pairs = list(itertools.combinations(range(n), 2))
    perms = list(itertools.permutations(range(n)))
    seen: set[int] = set()
    out: list[Graph] = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        canon = None
        for perm in perms:
            code = 0
            for u, v in edges:
                a, b = perm[u], perm[v]
                if a > b:
                    a, b = b, a
                code |= 1 << pairs.index((a, b))
            if canon is None or code < canon:
                canon = code
        if canon not in seen:
            seen.add(canon)
            out.append(Graph.from_edges(n, edges))
    return out


@dataclass(frozen=True)
class ListAssignment:
    """Per-vertex sets of allowed colors, stored sorted."""

    lists: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        norm = []
        for u, lst in enumerate(self.lists):
            vals = sorted(set(int(c) for c in lst))
            if any(c < 0 for c in vals):
                raise GraphError(f"vertex {u} has a negative color in its list")
            if not vals:
                raise GraphError(f"vertex {u} has an empty list")
            norm.append(tuple(vals))
        object.__setattr__(self, "lists", tuple(norm))

    def __getitem__(self, u: int) -> tuple[int, ...]:
        return self.lists[u]

    def __len__(self) -> int:
        return len(self.lists)

    @property
    def uniform_size(self) -> int | None:
        sizes = {len(lst) for lst in self.lists}
        return sizes.pop() if len(sizes) == 1 else None

    def color_universe(self) -> tuple[int, ...]:
        u: set[int] = set()
        for lst in self.lists:
            u.update(lst)
        return tuple(sorted(u))

    @classmethod
    def uniform(cls, n: int, k: int) -> "ListAssignment":
        return cls(tuple(tuple(range(k)) for _ in range(n)))


def parse_lists(text: str) -> ListAssignment:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append(tuple(int(tok) for tok in line.split()))
    if not rows:
        raise GraphError("empty list-assignment document")
    return ListAssignment(tuple(rows))


def parse_coloring(text: str, n: int | None = None) -> Coloring:
    toks = text.split()
    if not toks:
        raise GraphError("empty coloring document")
    colors = tuple(int(t) for t in toks)
    if n is not None and len(colors) != n:
        raise GraphError(f"coloring has {len(colors)} entries for {n} vertices")
    return colors
