"""Shared fixtures: the exhaustive small-instance family and its drift sweep.

The family is every non-isomorphic simple graph on at most five vertices with
every palette size k in {3, 4, 5}.  Adjacent proper pairs are enumerated in
both orientations and deduplicated up to color renaming; all audited
quantities (coupling marginals, per-color drift, beta) are equivariant under
color bijections, so one representative per orbit certifies the whole orbit.
A spot test in test_coupling.py checks the equivariance assumption directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import pytest

from fliplab.coupling import build_coupling, nabla_report
from fliplab.graphs import Graph, enumerate_nonisomorphic, is_proper, proper_colorings
from fliplab.metric import AdjacentPair, Configuration, beta, configuration
from fliplab.params import P_IMPROVED


def small_graph_family() -> list[Graph]:
    graphs: list[Graph] = []
    for n in range(1, 6):
        graphs.extend(enumerate_nonisomorphic(n))
    return graphs


def adjacent_proper_pairs(g: Graph, k: int, both_orientations: bool = True):
    for sigma in proper_colorings(g, k):
        for v in range(g.n):
            for c in range(k):
                if c == sigma[v]:
                    continue
                if not both_orientations and c < sigma[v]:
                    continue
                tau = list(sigma)
                tau[v] = c
                tau = tuple(tau)
                if is_proper(g, tau):
                    yield AdjacentPair(sigma, tau, v)


def color_canonical_key(pair: AdjacentPair) -> tuple[int, ...]:
    mapping: dict[int, int] = {}
    out = []
    for c in itertools.chain(pair.sigma, pair.tau):
        if c not in mapping:
            mapping[c] = len(mapping)
        out.append(mapping[c])
    return tuple(out)


@dataclass(frozen=True)
class SweepRecord:
    graph_index: int
    k: int
    pair: AdjacentPair
    beta: Fraction
    drift_by_color: dict[int, Fraction]
    configurations: dict[int, Configuration]
    flags: tuple[str, ...]


@pytest.fixture(scope="session")
def family_graphs() -> list[Graph]:
    return small_graph_family()


@pytest.fixture(scope="session")
def drift_sweep(family_graphs) -> list[SweepRecord]:
    """Coupling + drift results for every canonical adjacent proper pair.

    Building each coupling runs the exact marginal audit internally, so this
    fixture existing at all certifies the marginal criterion for the family.
    """
    records: list[SweepRecord] = []
    for gi, g in enumerate(family_graphs):
        for k in (3, 4, 5):
            seen: set[tuple[int, ...]] = set()
            for pair in adjacent_proper_pairs(g, k):
                key = color_canonical_key(pair)
                if key in seen:
                    continue
                seen.add(key)
                coupling = build_coupling(g, pair, P_IMPROVED, k=k)
                records.append(
                    SweepRecord(
                        graph_index=gi,
                        k=k,
                        pair=pair,
                        beta=beta(g, pair),
                        drift_by_color=coupling.hamming_drift_by_color(),
                        configurations={
                            c: configuration(g, pair, c) for c in range(k)
                        },
                        flags=coupling.flags,
                    )
                )
    return records
