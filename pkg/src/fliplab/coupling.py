"""One-step coupling of flip dynamics for colorings that differ at one vertex.

For each non-special color the coupling matches the component through the
disagreement vertex on one side with the largest neighbor component on the
other, pairs the remaining neighbor components index by index with the
residual masses split against the idle move, and couples every component
away from the disagreement vertex identically.  The two colors held at the
disagreement vertex ("special" colors) are matched greedily by family and
overlap, which reproduces the coalescing single-vertex moves on proper pairs
and stays marginal-correct on improper ones.

Marginals are audited exactly against the chain's per-component move
probabilities at construction time; a mismatch raises CouplingInternalError.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graphs import Graph, ListAssignment, is_proper
from .kempe import ComponentKey, KempeComponent, component, enumerate_components, flip
from .metric import (
    AdjacentPair,
    Configuration,
    ExactMetric,
    beta,
    configuration,
    hamming,
)
from .params import EPS_IMPROVEMENT, KAPPA_BASELINE, P_IMPROVED, FlipParams


class CouplingError(ValueError):
    """Coupling misuse: wrong pair shape, missing parameters, bad mode."""


class CouplingInternalError(RuntimeError):
    """Post-construction marginal audit failed; indicates a bug."""


@dataclass(frozen=True)
class CouplingEntry:
    left: KempeComponent | None
    right: KempeComponent | None
    prob: Fraction
    family: int | None
    kind: str


@dataclass(frozen=True)
class JointCoupling:
    pair: AdjacentPair
    scale: int
    p: FlipParams
    entries: tuple[CouplingEntry, ...]
    flags: tuple[str, ...]

    def left_marginal(self) -> dict[ComponentKey, Fraction]:
        out: dict[ComponentKey, Fraction] = {}
        for e in self.entries:
            if e.left is not None:
                out[e.left.key] = out.get(e.left.key, Fraction(0)) + e.prob
        return out

    def right_marginal(self) -> dict[ComponentKey, Fraction]:
        out: dict[ComponentKey, Fraction] = {}
        for e in self.entries:
            if e.right is not None:
                out[e.right.key] = out.get(e.right.key, Fraction(0)) + e.prob
        return out

    def total(self) -> Fraction:
        return sum(e.prob for e in self.entries)

    def results(self, entry: CouplingEntry):
        x = flip(self.pair.sigma, entry.left) if entry.left else self.pair.sigma
        y = flip(self.pair.tau, entry.right) if entry.right else self.pair.tau
        return x, y

    def hamming_drift_by_color(self) -> dict[int, Fraction]:
        """Rescaled expected Hamming change, split by originating color.

        Components coupled identically away from the disagreement vertex
        never change the Hamming distance and are omitted.
        """
        out: dict[int, Fraction] = {}
        for e in self.entries:
            if e.family is None:
                continue
            x, y = self.results(e)
            change = hamming(x, y) - 1
            if change:
                out[e.family] = out.get(e.family, Fraction(0)) + e.prob * change
        return {c: v * self.scale for c, v in out.items()}

    def hamming_drift(self) -> Fraction:
        return sum(self.hamming_drift_by_color().values(), Fraction(0))


def _claim(claimed: dict[ComponentKey, set[int]], comp: KempeComponent, fam: int):
    claimed.setdefault(comp.key, set()).add(fam)


def _q_vector(
    entries: Sequence[int], total: int, i_max: int | None, p: FlipParams
) -> list[Fraction]:
    out = []
    for i, size in enumerate(entries):
        if i == i_max:
            out.append(p(max(entries)) - p(total))
        else:
            out.append(p(size))
    return out


def build_coupling(
    g: Graph,
    pair: AdjacentPair,
    p: FlipParams,
    k: int | None = None,
    lists: ListAssignment | None = None,
) -> JointCoupling:
    """Joint one-step distribution for an adjacent pair, exact marginals."""
    if (k is None) == (lists is None):
        raise CouplingError("pass exactly one of k or lists")
    if lists is not None and lists.uniform_size is None:
        raise CouplingError("coupling requires uniform list sizes")
    sigma, tau, v = pair.sigma, pair.tau, pair.v
    s, t = sigma[v], tau[v]
    width = k if k is not None else lists.uniform_size
    scale = width * g.n

    multiset_l = enumerate_components(g, sigma, k=k, lists=lists)
    multiset_r = enumerate_components(g, tau, k=k, lists=lists)
    mass_l = multiset_l.flip_probabilities(p, lists)
    mass_r = multiset_r.flip_probabilities(p, lists)
    comps_l = multiset_l.by_key()
    comps_r = multiset_r.by_key()

    universe = range(k) if k is not None else lists.color_universe()
    entries: list[CouplingEntry] = []
    claimed_l: dict[ComponentKey, set[int]] = {}
    claimed_r: dict[ComponentKey, set[int]] = {}

    def check_mass(mass_map, comp, expected, side):
        actual = mass_map.get(comp.key, Fraction(0))
        if actual != expected:
            raise CouplingInternalError(
                f"{side} component {comp.key} carries {actual}, expected {expected}"
            )

    for c in universe:
        if c in (s, t):
            continue
        conf = configuration(g, pair, c, lists)
        big_l = component(g, sigma, v, c)
        big_r = component(g, tau, v, c)
        _claim(claimed_l, big_l, c)
        _claim(claimed_r, big_r, c)
        if conf.r == 0:
            m_l = Fraction(p(conf.a_total), scale)
            m_r = Fraction(p(conf.b_total), scale)
            check_mass(mass_l, big_l, m_l, "left")
            check_mass(mass_r, big_r, m_r, "right")
            if m_l != m_r:
                raise CouplingInternalError("unequal singleton masses at r = 0")
            if m_l > 0:
                entries.append(CouplingEntry(big_l, big_r, m_l, c, "r0"))
            continue
        w_l = [component(g, sigma, w, t) for w in conf.neighbors]
        w_r = [component(g, tau, w, s) for w in conf.neighbors]
        for comp, size in zip(w_l, conf.b):
            _claim(claimed_l, comp, c)
            if size > 0:
                check_mass(mass_l, comp, Fraction(p(size), scale), "left")
        for comp, size in zip(w_r, conf.a):
            _claim(claimed_r, comp, c)
            if size > 0:
                check_mass(mass_r, comp, Fraction(p(size), scale), "right")
        m_big_l = Fraction(p(conf.a_total), scale)
        m_big_r = Fraction(p(conf.b_total), scale)
        check_mass(mass_l, big_l, m_big_l, "left")
        check_mass(mass_r, big_r, m_big_r, "right")
        if m_big_l > 0:
            entries.append(
                CouplingEntry(big_l, w_r[conf.i_a], m_big_l, c, "big-left")
            )
        if m_big_r > 0:
            entries.append(
                CouplingEntry(w_l[conf.i_b], big_r, m_big_r, c, "big-right")
            )
        q = _q_vector(conf.a, conf.a_total, conf.i_a, p)
        qp = _q_vector(conf.b, conf.b_total, conf.i_b, p)
        for i in range(conf.r):
            flow = min(q[i], qp[i])
            if flow > 0:
                entries.append(
                    CouplingEntry(w_l[i], w_r[i], Fraction(flow, scale), c, "paired")
                )
            if q[i] > flow:
                entries.append(
                    CouplingEntry(
                        None, w_r[i], Fraction(q[i] - flow, scale), c, "from-idle"
                    )
                )
            if qp[i] > flow:
                entries.append(
                    CouplingEntry(
                        w_l[i], None, Fraction(qp[i] - flow, scale), c, "to-idle"
                    )
                )

    special_greedy = _couple_special_block(
        g, pair, entries, claimed_l, claimed_r, mass_l, mass_r, comps_l, comps_r
    )

    comp_keys_l = set(comps_l) - set(claimed_l)
    comp_keys_r = set(comps_r) - set(claimed_r)
    if comp_keys_l != comp_keys_r:
        raise CouplingInternalError("shared complements of the two sides differ")
    for key in sorted(comp_keys_l, key=lambda key: (sorted(key[0]), key[1])):
        comp = comps_l[key]
        if v in comp.vertices:
            raise CouplingInternalError(
                "complement component touches the disagreement vertex"
            )
        m = mass_l[key]
        if m != mass_r[key]:
            raise CouplingInternalError("complement masses differ between sides")
        if m > 0:
            entries.append(CouplingEntry(comp, comps_r[key], m, None, "complement"))

    total = sum(e.prob for e in entries)
    if total > 1:
        raise CouplingInternalError(f"coupled mass {total} exceeds 1")
    if total < 1:
        entries.append(CouplingEntry(None, None, 1 - total, None, "idle"))

    flags = []
    if not (is_proper(g, sigma) and is_proper(g, tau)):
        flags.append("improper")
    if special_greedy:
        flags.append("special-greedy")

    coupling = JointCoupling(
        pair=pair, scale=scale, p=p, entries=tuple(entries), flags=tuple(flags)
    )
    _audit(coupling, mass_l, mass_r)
    return coupling


def _couple_special_block(
    g, pair, entries, claimed_l, claimed_r, mass_l, mass_r, comps_l, comps_r
) -> bool:
    """Greedy marginal-correct matching for the two disagreement colors.

    Returns True when the block needed anything beyond the two coalescing
    single-vertex matches of a proper pair.
    """
    sigma, tau, v = pair.sigma, pair.tau, pair.v
    s, t = sigma[v], tau[v]

    def side_members(base, other_at_v):
        members: dict[ComponentKey, tuple[KempeComponent, set[int]]] = {}
        for c in (s, t):
            fam_comps = [component(g, base, v, c)]
            fam_comps.extend(
                component(g, base, w, other_at_v)
                for w in g.adjacency[v]
                if base[w] == c
            )
            for comp in fam_comps:
                if comp.key in members:
                    members[comp.key][1].add(c)
                else:
                    members[comp.key] = (comp, {c})
        return members

    left = side_members(sigma, t)
    right = side_members(tau, s)
    for key, (comp, fams) in left.items():
        for c in fams:
            _claim(claimed_l, comp, c)
    for key, (comp, fams) in right.items():
        for c in fams:
            _claim(claimed_r, comp, c)

    residual_l = {key: mass_l.get(key, Fraction(0)) for key in left}
    residual_r = {key: mass_r.get(key, Fraction(0)) for key in right}

    def order(item):
        (lkey, (lcomp, lfams)), (rkey, (rcomp, rfams)) = item
        shared_family = 0 if lfams & rfams else 1
        overlap = len(set(lcomp.vertices) & set(rcomp.vertices))
        return (shared_family, -overlap, sorted(lkey[0]), lkey[1], sorted(rkey[0]), rkey[1])

    candidates = sorted(
        ((li, ri) for li in left.items() for ri in right.items()), key=order
    )
    nontrivial = False
    for (lkey, (lcomp, lfams)), (rkey, (rcomp, rfams)) in candidates:
        flow = min(residual_l[lkey], residual_r[rkey])
        if flow <= 0:
            continue
        common = lfams & rfams
        fam = min(common) if common else min(lfams)
        entries.append(CouplingEntry(lcomp, rcomp, flow, fam, "special"))
        residual_l[lkey] -= flow
        residual_r[rkey] -= flow
        if not common or lcomp.size > 1 or rcomp.size > 1:
            nontrivial = True
    for key, res in residual_l.items():
        if res > 0:
            comp, fams = left[key]
            entries.append(CouplingEntry(comp, None, res, min(fams), "special"))
            nontrivial = True
    for key, res in residual_r.items():
        if res > 0:
            comp, fams = right[key]
            entries.append(CouplingEntry(None, comp, res, min(fams), "special"))
            nontrivial = True
    return nontrivial


def _audit(coupling: JointCoupling, mass_l, mass_r) -> None:
    left = coupling.left_marginal()
    right = coupling.right_marginal()
    for key, expected in mass_l.items():
        if left.get(key, Fraction(0)) != expected:
            raise CouplingInternalError(
                f"left marginal of {key}: {left.get(key, Fraction(0))} != {expected}"
            )
    for key in left:
        if key not in mass_l:
            raise CouplingInternalError(f"left coupling uses unknown component {key}")
    for key, expected in mass_r.items():
        if right.get(key, Fraction(0)) != expected:
            raise CouplingInternalError(
                f"right marginal of {key}: {right.get(key, Fraction(0))} != {expected}"
            )
    for key in right:
        if key not in mass_r:
            raise CouplingInternalError(f"right coupling uses unknown component {key}")
    if coupling.total() != 1:
        raise CouplingInternalError("coupled mass does not total 1")


def hamming_drift_bound(conf: Configuration, p: FlipParams) -> Fraction:
    """Per-color upper bound on the rescaled Hamming drift (r >= 1 profiles).

    Valid for colors other than the two held at the disagreement vertex.
    """
    if conf.r == 0:
        return Fraction(-1)
    pa, pb = p(conf.a_total), p(conf.b_total)
    q = _q_vector(conf.a, conf.a_total, conf.i_a, p)
    qp = _q_vector(conf.b, conf.b_total, conf.i_b, p)
    value = (conf.a_total - conf.a_max - 1) * pa + (conf.b_total - conf.b_max - 1) * pb
    for i in range(conf.r):
        value += conf.a[i] * q[i] + conf.b[i] * qp[i] - min(q[i], qp[i])
    return value


@dataclass(frozen=True)
class NablaReport:
    """Exact drift diagnostics for one adjacent pair under the coupling."""

    n: int
    k: int
    max_degree: int
    v: int
    beta: Fraction
    gamma: Fraction | None
    nabla_h_by_color: dict[int, Fraction]
    nabla_h: Fraction
    nabla_b: Fraction | None
    nabla: Fraction | None
    mode: str
    flags: tuple[str, ...]

    CSV_HEADER = (
        "n,max_degree,k,v,beta,nabla_H,nabla_B,nabla,mode,flags"
    )

    def csv_row(self) -> str:
        nb = "" if self.nabla_b is None else str(self.nabla_b)
        nab = "" if self.nabla is None else str(self.nabla)
        flags = ";".join(self.flags)
        return (
            f"{self.n},{self.max_degree},{self.k},{self.v},{self.beta},"
            f"{self.nabla_h},{nb},{nab},{self.mode},{flags}"
        )


def nabla_report(
    g: Graph,
    pair: AdjacentPair,
    p: FlipParams,
    k: int | None = None,
    lists: ListAssignment | None = None,
    gamma=None,
    mode: str = "hamming",
    metric: ExactMetric | None = None,
    coupling: JointCoupling | None = None,
) -> NablaReport:
    """Drift report for an adjacent pair.

    mode "hamming" computes the Hamming drift only; "exact" adds the exact
    metric-slack drift via shortest paths (palette mode only, small state
    spaces); "bound" substitutes the worst-case slack-drift estimate
    -gamma (k/D - 3/2) beta + 2 gamma (10 + 16 k/D)(1 - beta).
    """
    if coupling is None:
        coupling = build_coupling(g, pair, p, k=k, lists=lists)
    width = k if k is not None else lists.uniform_size
    by_color = coupling.hamming_drift_by_color()
    nabla_h = sum(by_color.values(), Fraction(0))
    b = beta(g, pair, lists)
    nabla_b = None
    nabla = None
    if mode == "hamming":
        pass
    elif mode == "exact":
        if lists is not None:
            raise CouplingError("exact mode works on palette colorings only")
        if gamma is None:
            raise CouplingError("exact mode needs gamma")
        gamma = Fraction(gamma)
        if metric is None:
            metric = ExactMetric(g, k, gamma)
        base = metric.d_b(pair.sigma, pair.tau)
        acc = Fraction(0)
        for e in coupling.entries:
            if e.kind == "idle":
                continue
            if e.kind == "complement":
                x, y = coupling.results(e)
                flipped = AdjacentPair(x, y, pair.v)
                d_b = gamma * (1 - beta(g, flipped, lists))
            else:
                x, y = coupling.results(e)
                d_b = metric.d_b(x, y)
            acc += e.prob * (d_b - base)
        nabla_b = -coupling.scale * acc
        nabla = nabla_h + nabla_b
    elif mode == "bound":
        if gamma is None:
            raise CouplingError("bound mode needs gamma")
        gamma = Fraction(gamma)
        delta = g.max_degree
        if delta == 0:
            raise CouplingError("bound mode needs max degree >= 1")
        nabla_b = -gamma * (Fraction(width, delta) - Fraction(3, 2)) * b + 2 * gamma * (
            10 + Fraction(16 * width, delta)
        ) * (1 - b)
        nabla = nabla_h + nabla_b
    else:
        raise CouplingError(f"unknown mode {mode!r}")
    return NablaReport(
        n=g.n,
        k=width,
        max_degree=g.max_degree,
        v=pair.v,
        beta=b,
        gamma=None if gamma is None else Fraction(gamma),
        nabla_h_by_color=by_color,
        nabla_h=nabla_h,
        nabla_b=nabla_b,
        nabla=nabla,
        mode=mode,
        flags=coupling.flags,
    )


def check_hamming_contraction(
    g: Graph, pair: AdjacentPair, k: int, p: FlipParams
) -> tuple[bool, Fraction]:
    """Verify nabla_H <= (11/6 - eps (1 - beta)) * Delta - k for the tuned p.

    Returns (holds, slack).  Only the tuned parameter vector is accepted;
    the constant eps = 1/264 is tied to it.
    """
    if any(p(ell) != P_IMPROVED(ell) for ell in range(1, max(p.cutoff, 8))):
        raise CouplingError("contraction check is specific to the tuned parameters")
    report = nabla_report(g, pair, p, k=k, mode="hamming")
    rhs = (KAPPA_BASELINE - EPS_IMPROVEMENT * (1 - report.beta)) * g.max_degree - k
    slack = rhs - report.nabla_h
    return slack >= 0, slack


def complement_beta_drift(
    g: Graph,
    pair: AdjacentPair,
    c: int,
    p: FlipParams,
    gamma,
    k: int | None = None,
    lists: ListAssignment | None = None,
    coupling: JointCoupling | None = None,
) -> Fraction:
    """Contribution of color c to the slack drift from identically coupled moves.

    Sums gamma/Delta * p_|S| * xi over the shared complement, where xi tracks
    how the extremality status of c changes when both chains flip S.
    """
    gamma = Fraction(gamma)
    if coupling is None:
        coupling = build_coupling(g, pair, p, k=k, lists=lists)
    delta = g.max_degree
    if delta == 0:
        return Fraction(0)

    def status(pr: AdjacentPair) -> int:
        from .metric import Extremality, classify, configuration as conf_fn

        cls = classify(conf_fn(g, pr, c, lists))
        if cls is Extremality.EXT1:
            return 1
        if cls is Extremality.EXT2:
            return 2
        return 0

    before = status(pair)
    acc = Fraction(0)
    for e in coupling.entries:
        if e.kind != "complement":
            continue
        x, y = coupling.results(e)
        after = status(AdjacentPair(x, y, pair.v))
        xi = after - before
        if xi:
            acc += p(e.left.size) * xi
    return gamma * acc / delta
