"""Single-site and flip Markov chains on colorings, with exact matrices.

Simulation draws come from a counter-based Philox 4x64 generator (numpy's
implementation) seeded by a single 64-bit integer.  Each step consumes, in
order: one bounded draw for the vertex, one for the color, and one accept
draw when the move has acceptance probability strictly between 0 and 1 is
required (flip moves with p_ell > 0; Glauber never draws for acceptance).
Bounded draws use rejection sampling on raw 64-bit words, so they are exactly
uniform; accept draws compare a raw word against floor(p * 2**64).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .graphs import (
    Coloring,
    Graph,
    ListAssignment,
    all_colorings,
    is_proper,
    proper_colorings,
    validate_coloring,
)
from .kempe import component, flip, is_flippable
from .params import FlipParams


class DynamicsError(ValueError):
    """Bad chain configuration, e.g. a state space beyond the cap."""


TWO64 = 1 << 64


class ChainRng:
    """Deterministic stream of 64-bit words (Philox 4x64, one 64-bit seed)."""

    def __init__(self, seed: int):
        self._gen = np.random.Generator(
            np.random.Philox(key=[seed & (TWO64 - 1), 0])
        )

    def raw64(self) -> int:
        return int(self._gen.integers(0, TWO64, dtype=np.uint64))

    def below(self, bound: int) -> int:
        """Exactly uniform draw from range(bound) by rejection."""
        if bound <= 0:
            raise DynamicsError("bound must be positive")
        limit = TWO64 - TWO64 % bound
        while True:
            u = self.raw64()
            if u < limit:
                return u % bound

    def accept(self, threshold: int) -> bool:
        """Accept draw against a precomputed floor(p * 2**64) threshold."""
        if threshold <= 0:
            return False
        if threshold >= TWO64:
            return True
        return self.raw64() < threshold


def glauber_step(g: Graph, colors: Sequence[int], k: int, rng: ChainRng) -> Coloring:
    """Recolor one uniform vertex with one uniform color if no neighbor holds it."""
    u = rng.below(g.n)
    c = rng.below(k)
    if all(colors[w] != c for w in g.adjacency[u]):
        out = list(colors)
        out[u] = c
        return tuple(out)
    return tuple(colors)


def flip_step(
    g: Graph, colors: Sequence[int], k: int, p: FlipParams, rng: ChainRng
) -> Coloring:
    """Flip the component of a uniform (vertex, color) pair w.p. p_ell / ell."""
    u = rng.below(g.n)
    c = rng.below(k)
    comp = component(g, colors, u, c, size_cap=p.cutoff)
    if comp.truncated:
        return tuple(colors)
    threshold = p.accept_threshold(comp.size)
    if threshold > 0 and rng.accept(threshold):
        return flip(colors, comp)
    return tuple(colors)


def glauber_list_step(
    g: Graph, colors: Sequence[int], lists: ListAssignment, rng: ChainRng
) -> Coloring:
    u = rng.below(g.n)
    palette = lists[u]
    c = palette[rng.below(len(palette))]
    if all(colors[w] != c for w in g.adjacency[u]):
        out = list(colors)
        out[u] = c
        return tuple(out)
    return tuple(colors)


def flip_list_step(
    g: Graph,
    colors: Sequence[int],
    lists: ListAssignment,
    p: FlipParams,
    rng: ChainRng,
) -> Coloring:
    """List variant: only flippable components may move."""
    u = rng.below(g.n)
    palette = lists[u]
    c = palette[rng.below(len(palette))]
    comp = component(g, colors, u, c, size_cap=p.cutoff)
    if comp.truncated or not is_flippable(lists, comp):
        return tuple(colors)
    threshold = p.accept_threshold(comp.size)
    if threshold > 0 and rng.accept(threshold):
        return flip(colors, comp)
    return tuple(colors)


CHAIN_KINDS = ("glauber", "flip", "glauber-list", "flip-list")


def step_function(
    kind: str,
    g: Graph,
    k: int | None = None,
    lists: ListAssignment | None = None,
    p: FlipParams | None = None,
) -> Callable[[Sequence[int], ChainRng], Coloring]:
    if kind == "glauber":
        if k is None:
            raise DynamicsError("glauber needs a palette size k")
        return lambda colors, rng: glauber_step(g, colors, k, rng)
    if kind == "flip":
        if k is None or p is None:
            raise DynamicsError("flip needs k and flip parameters")
        return lambda colors, rng: flip_step(g, colors, k, p, rng)
    if kind == "glauber-list":
        if lists is None:
            raise DynamicsError("glauber-list needs a list assignment")
        return lambda colors, rng: glauber_list_step(g, colors, lists, rng)
    if kind == "flip-list":
        if lists is None or p is None:
            raise DynamicsError("flip-list needs lists and flip parameters")
        return lambda colors, rng: flip_list_step(g, colors, lists, p, rng)
    raise DynamicsError(f"unknown chain kind {kind!r}; choose from {CHAIN_KINDS}")


@dataclass(frozen=True)
class ChainResult:
    final: Coloring
    steps: int
    first_proper_step: int | None
    proper_final: bool
    color_histogram: tuple[int, ...]


def run_chain(
    g: Graph,
    start: Sequence[int],
    kind: str,
    steps: int,
    seed: int,
    k: int | None = None,
    lists: ListAssignment | None = None,
    p: FlipParams | None = None,
) -> ChainResult:
    if steps < 0:
        raise DynamicsError("steps must be non-negative")
    if k is not None:
        validate_coloring(g, start, k)
    step = step_function(kind, g, k=k, lists=lists, p=p)
    rng = ChainRng(seed)
    colors = tuple(start)
    first_proper = 0 if is_proper(g, colors) else None
    for t in range(1, steps + 1):
        colors = step(colors, rng)
        if first_proper is None and is_proper(g, colors):
            first_proper = t
    n_colors = (max(colors) + 1) if colors else 0
    if k is not None:
        n_colors = k
    hist = [0] * n_colors
    for c in colors:
        hist[c] += 1
    return ChainResult(
        final=colors,
        steps=steps,
        first_proper_step=first_proper,
        proper_final=is_proper(g, colors),
        color_histogram=tuple(hist),
    )


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix with exact rational entries over listed states."""

    states: tuple[Coloring, ...]
    rows: tuple[tuple[tuple[int, Fraction], ...], ...]
    kind: str

    @property
    def n_states(self) -> int:
        return len(self.states)

    def index(self) -> dict[Coloring, int]:
        return {s: i for i, s in enumerate(self.states)}

    def row_dict(self, i: int) -> dict[int, Fraction]:
        return dict(self.rows[i])

    def row_sums(self) -> list[Fraction]:
        return [sum(v for _, v in row) for row in self.rows]

    def entry(self, i: int, j: int) -> Fraction:
        for col, v in self.rows[i]:
            if col == j:
                return v
        return Fraction(0)

    def is_symmetric(self) -> bool:
        table: dict[tuple[int, int], Fraction] = {}
        for i, row in enumerate(self.rows):
            for j, v in row:
                table[(i, j)] = v
        return all(table.get((j, i), Fraction(0)) == v for (i, j), v in table.items())

    def column_sums(self) -> list[Fraction]:
        sums = [Fraction(0)] * self.n_states
        for row in self.rows:
            for j, v in row:
                sums[j] += v
        return sums

    def triplets(self) -> Iterator[tuple[int, int, Fraction]]:
        for i, row in enumerate(self.rows):
            for j, v in row:
                yield i, j, v

    def to_dense(self, dtype=np.longdouble) -> np.ndarray:
        m = np.zeros((self.n_states, self.n_states), dtype=dtype)
        for i, j, v in self.triplets():
            m[i, j] = dtype(v.numerator) / dtype(v.denominator)
        return m


def _state_space(
    g: Graph,
    k: int | None,
    lists: ListAssignment | None,
    restrict_to_proper: bool,
    cap: int,
) -> tuple[Coloring, ...]:
    if k is not None:
        total = k**g.n
        if not restrict_to_proper:
            if total > cap:
                raise DynamicsError(f"state space {total} exceeds cap {cap}")
            return tuple(all_colorings(g, k))
        states = tuple(proper_colorings(g, k))
    else:
        total = 1
        for lst in lists.lists:
            total *= len(lst)
        if not restrict_to_proper:
            if total > cap:
                raise DynamicsError(f"state space {total} exceeds cap {cap}")
            return tuple(itertools.product(*lists.lists))
        states = tuple(
            s for s in itertools.product(*lists.lists) if is_proper(g, s)
        )
    if len(states) > cap:
        raise DynamicsError(f"state space {len(states)} exceeds cap {cap}")
    return states


def transition_matrix(
    g: Graph,
    kind: str,
    k: int | None = None,
    lists: ListAssignment | None = None,
    p: FlipParams | None = None,
    restrict_to_proper: bool = False,
    cap: int = 10**6,
) -> TransitionMatrix:
    """Exact one-step matrix of the chosen chain over the full or proper space."""
    if (k is None) == (lists is None):
        raise DynamicsError("pass exactly one of k or lists")
    if kind in ("flip", "flip-list") and p is None:
        raise DynamicsError("flip chains need flip parameters")
    states = _state_space(g, k, lists, restrict_to_proper, cap)
    index = {s: i for i, s in enumerate(states)}
    rows = []
    for s in states:
        acc: dict[int, Fraction] = {}
        diag = Fraction(0)
        for u in range(g.n):
            palette = range(k) if k is not None else lists[u]
            share = Fraction(1, g.n * (k if k is not None else len(lists[u])))
            for c in palette:
                if kind in ("glauber", "glauber-list"):
                    if all(s[w] != c for w in g.adjacency[u]):
                        t = list(s)
                        t[u] = c
                        t = tuple(t)
                        if t == s:
                            diag += share
                        else:
                            acc[index[t]] = acc.get(index[t], Fraction(0)) + share
                    else:
                        diag += share
                else:
                    comp = component(g, s, u, c)
                    if lists is not None and not is_flippable(lists, comp):
                        diag += share
                        continue
                    pl = p(comp.size)
                    if pl == 0:
                        diag += share
                        continue
                    move = share * pl / comp.size
                    t = flip(s, comp)
                    if t == s:
                        diag += move
                    else:
                        j = index[t]
                        acc[j] = acc.get(j, Fraction(0)) + move
                    diag += share * (1 - pl / comp.size)
        i = index[s]
        acc[i] = acc.get(i, Fraction(0)) + diag
        row = tuple(sorted(acc.items()))
        total = sum(v for _, v in row)
        if total != 1:
            raise DynamicsError(f"row for state {s} sums to {total}")
        rows.append(row)
    return TransitionMatrix(states=states, rows=tuple(rows), kind=kind)


def uniform_on_proper(
    g: Graph, matrix: TransitionMatrix
) -> tuple[Fraction, ...]:
    """Uniform distribution on the proper states of a matrix's state list."""
    proper_idx = [i for i, s in enumerate(matrix.states) if is_proper(g, s)]
    if not proper_idx:
        raise DynamicsError("no proper states in the state space")
    weight = Fraction(1, len(proper_idx))
    pi = [Fraction(0)] * matrix.n_states
    for i in proper_idx:
        pi[i] = weight
    return tuple(pi)


def tv_distance(row: Sequence[Fraction], pi: Sequence[Fraction]) -> Fraction:
    return sum(abs(a - b) for a, b in zip(row, pi)) / 2


def exact_tv_curve(
    g: Graph,
    matrix: TransitionMatrix,
    t_max: int,
    starts: Sequence[int] | None = None,
) -> list[Fraction]:
    """f(t) = max over start states of TV(P^t(start, .), uniform-on-proper).

    Exact rational arithmetic; cost grows with t_max * states^2, so this is
    meant for small state spaces.
    """
    pi = uniform_on_proper(g, matrix)
    if starts is None:
        starts = range(matrix.n_states)
    dists = []
    for i in starts:
        vec = [Fraction(0)] * matrix.n_states
        vec[i] = Fraction(1)
        dists.append(vec)
    curve = []
    for t in range(t_max + 1):
        curve.append(max(tv_distance(vec, pi) for vec in dists))
        if t == t_max:
            break
        nxt = []
        for vec in dists:
            out = [Fraction(0)] * matrix.n_states
            for i, mass in enumerate(vec):
                if mass == 0:
                    continue
                for j, v in matrix.rows[i]:
                    out[j] += mass * v
            nxt.append(out)
        dists = nxt
    return curve


def float_tv_curve(
    g: Graph,
    matrix: TransitionMatrix,
    t_max: int,
    starts: Sequence[int] | None = None,
) -> tuple[list[float], float]:
    """Extended-precision TV curve with a rigorous rounding-error bound.

    Returns (curve, error_bound); every exact value lies within error_bound
    of the reported one.  Arithmetic is numpy longdouble; the bound counts
    one rounding per accumulation in the t matrix-vector products plus the
    final TV sum.
    """
    n = matrix.n_states
    trips = sorted(matrix.triplets(), key=lambda t: t[1])
    rows_arr = np.array([i for i, _, _ in trips], dtype=np.int64)
    cols_arr = np.array([j for _, j, _ in trips], dtype=np.int64)
    vals_arr = np.array(
        [np.longdouble(v.numerator) / np.longdouble(v.denominator) for _, _, v in trips],
        dtype=np.longdouble,
    )
    col_starts = np.searchsorted(cols_arr, np.arange(n + 1))
    pi = np.array(
        [np.longdouble(x.numerator) / np.longdouble(x.denominator)
         for x in uniform_on_proper(g, matrix)],
        dtype=np.longdouble,
    )
    if starts is None:
        starts = range(n)
    starts = list(starts)
    vecs = np.zeros((len(starts), n), dtype=np.longdouble)
    for row_i, s in enumerate(starts):
        vecs[row_i, s] = 1
    eps = float(np.finfo(np.longdouble).eps)
    max_in_col = int(np.max(np.diff(col_starts))) if len(trips) else 0
    curve = []
    for t in range(t_max + 1):
        tv = 0.5 * np.abs(vecs - pi).sum(axis=1).max()
        curve.append(float(tv))
        if t == t_max:
            break
        nxt = np.empty_like(vecs)
        idx = np.minimum(col_starts[:-1], max(len(trips) - 1, 0))
        empty = np.diff(col_starts) == 0
        for row_i in range(vecs.shape[0]):
            prods = vals_arr * vecs[row_i, rows_arr]
            sums = np.add.reduceat(prods, idx)
            sums[empty] = 0
            nxt[row_i] = sums
        vecs = nxt
    per_step = (max_in_col + 2) * eps
    error_bound = n * (t_max * per_step + (n + 2) * eps)
    return curve, error_bound


def mixing_time(curve: Sequence[float | Fraction], eps=Fraction(1, 4)) -> int | None:
    for t, v in enumerate(curve):
        if v <= eps:
            return t
    return None
