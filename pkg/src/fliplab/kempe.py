"""Kempe components of (possibly improper) colorings, flips, and flippability.

A component is grown by alternating-path reachability: from a vertex holding
one of the two component colors one may only step to neighbors holding the
other.  Two adjacent vertices of the same color are therefore not directly
connected unless the two colors coincide (the monochromatic case).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graphs import Graph, ListAssignment


class KempeError(ValueError):
    """Component/flip misuse, e.g. flipping a stale or truncated component."""


ComponentKey = tuple[frozenset[int], tuple[int, ...]]


@dataclass(frozen=True)
class KempeComponent:
    """Triplet (color_a, color_b, vertices) anchored at the pair that grew it.

    ``color_a`` is the anchor vertex's color.  ``truncated`` marks a search
    stopped early by a size cap; such components must not be flipped.
    """

    color_a: int
    color_b: int
    vertices: tuple[int, ...]
    anchor: tuple[int, int]
    truncated: bool = False

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def key(self) -> ComponentKey:
        return (frozenset((self.color_a, self.color_b)), self.vertices)


def component(
    g: Graph,
    colors: Sequence[int],
    u: int,
    c: int,
    size_cap: int | None = None,
) -> KempeComponent:
    """Grow the component of ``u`` toward color ``c`` under ``colors``.

    With ``size_cap`` the search halts once the cap is reached; the result is
    marked truncated and only suitable for rejection decisions.
    """
    c1 = colors[u]
    c2 = c
    seen = {u}
    frontier = [u]
    truncated = size_cap is not None and len(seen) >= size_cap
    while frontier and not truncated:
        x = frontier.pop()
        want = c2 if colors[x] == c1 else c1
        for y in g.adjacency[x]:
            if y not in seen and colors[y] == want:
                seen.add(y)
                frontier.append(y)
                if size_cap is not None and len(seen) >= size_cap:
                    truncated = True
                    break
    return KempeComponent(c1, c2, tuple(sorted(seen)), (u, c), truncated)


def flip(colors: Sequence[int], comp: KempeComponent) -> tuple[int, ...]:
    """Swap the two component colors on the component's vertex set."""
    if comp.truncated:
        raise KempeError("refusing to flip a truncated component")
    out = list(colors)
    a, b = comp.color_a, comp.color_b
    for v in comp.vertices:
        cv = colors[v]
        if cv == a:
            out[v] = b
        elif cv == b:
            out[v] = a
        else:
            raise KempeError(f"stale component: vertex {v} no longer holds {a} or {b}")
    return tuple(out)


def is_flippable(lists: ListAssignment, comp: KempeComponent) -> bool:
    need = {comp.color_a, comp.color_b}
    return all(need.issubset(lists[v]) for v in comp.vertices)


@dataclass(frozen=True)
class ComponentMultiset:
    """All components of a coloring with their generating (vertex, color) pairs."""

    components: tuple[KempeComponent, ...]
    generating_pairs: tuple[tuple[tuple[int, int], ...], ...]
    palette_sizes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.components)

    def by_key(self) -> dict[ComponentKey, KempeComponent]:
        return {comp.key: comp for comp in self.components}

    def total_generating_pairs(self) -> int:
        return sum(len(p) for p in self.generating_pairs)

    def flip_probabilities(
        self,
        p,
        lists: ListAssignment | None = None,
    ) -> dict[ComponentKey, Fraction]:
        """Per-component one-step flip probability of the flip chain.

        Each generating pair (u, c) proposes the component with probability
        1/(n * palette(u)) and accepts with p_ell / ell; non-flippable
        components in list mode have probability zero.
        """
        out: dict[ComponentKey, Fraction] = {}
        n = len(self.palette_sizes)
        for comp, pairs in zip(self.components, self.generating_pairs):
            if lists is not None and not is_flippable(lists, comp):
                out[comp.key] = Fraction(0)
                continue
            ell = comp.size
            mass = Fraction(0)
            for (u, _c) in pairs:
                mass += Fraction(1, n * self.palette_sizes[u]) * p(ell) / ell
            out[comp.key] = mass
        return out


def enumerate_components(
    g: Graph,
    colors: Sequence[int],
    k: int | None = None,
    lists: ListAssignment | None = None,
) -> ComponentMultiset:
    """Every component reachable from some proposal pair (u, c).

    In palette mode c ranges over range(k); in list mode over lists[u].
    Components are grouped by (unordered color pair, vertex set); a component
    of size ell collects exactly ell generating pairs in palette mode.
    """
    if (k is None) == (lists is None):
        raise KempeError("pass exactly one of k or lists")
    found: dict[ComponentKey, KempeComponent] = {}
    pairs: dict[ComponentKey, list[tuple[int, int]]] = {}
    for u in range(g.n):
        palette = range(k) if k is not None else lists[u]
        for c in palette:
            comp = component(g, colors, u, c)
            key = comp.key
            if key not in found:
                found[key] = comp
                pairs[key] = []
            pairs[key].append((u, c))
    keys = sorted(found, key=lambda key: (sorted(key[0]), key[1]))
    comps = tuple(found[key] for key in keys)
    if k is not None:
        for comp, key in zip(comps, keys):
            if len(pairs[key]) != comp.size:
                raise KempeError(
                    f"component {key} generated by {len(pairs[key])} pairs, "
                    f"expected {comp.size}"
                )
    palette_sizes = tuple(
        (k if k is not None else len(lists[u])) for u in range(g.n)
    )
    return ComponentMultiset(
        components=comps,
        generating_pairs=tuple(tuple(pairs[key]) for key in keys),
        palette_sizes=palette_sizes,
    )
