"""Exact-rational linear programs over flip parameters.

The configuration programs ask for the smallest kappa such that every
component-size profile (a_1..a_r; b_1..b_r) obeys its drift inequality
<= r kappa - 1; minimum/maximum choices inside the inequalities are expanded
into one linear constraint per resolution.  The reduced programs carry the
profile families known to matter: 1-profiles up to size six and 2-profiles
(l, l; 1, 1) for l in {2, 3}.  The starred variants drop the rows of the
four extremal profiles and pin p_3 = 1/6, p_7 = 0 instead.

Solving is two-phase primal simplex over Fractions with Bland's rule; every
reported optimum carries an independently verified dual certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .coupling import hamming_drift_bound
from .metric import Configuration
from .params import KAPPA_BASELINE, FlipParams


class LPError(ValueError):
    """Bad program construction or solver misuse."""


class LPInternalError(RuntimeError):
    """Certificate verification failed; indicates a solver bug."""


KAPPA = "kappa"


def pvar(ell: int) -> str:
    return f"p{ell}"


@dataclass(frozen=True)
class LinearConstraint:
    """Sum of coeffs . vars <= rhs, with a provenance tag."""

    coeffs: tuple[tuple[str, Fraction], ...]
    rhs: Fraction
    tag: str

    @classmethod
    def make(cls, coeffs: dict[str, Fraction], rhs, tag: str) -> "LinearConstraint":
        clean = tuple(
            sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0)
        )
        return cls(clean, Fraction(rhs), tag)

    def lhs(self, values: dict[str, Fraction]) -> Fraction:
        return sum(c * values[v] for v, c in self.coeffs)

    def dedupe_key(self):
        return (self.coeffs, self.rhs)


@dataclass(frozen=True)
class LPProgram:
    name: str
    variables: tuple[str, ...]
    constraints: tuple[LinearConstraint, ...]
    fixed: dict[str, Fraction] = field(default_factory=dict)
    objective: str = KAPPA

    def values_from(self, p: FlipParams, kappa) -> dict[str, Fraction]:
        """Full variable valuation induced by a parameter vector and kappa."""
        values: dict[str, Fraction] = {KAPPA: Fraction(kappa)}
        names = set(self.fixed)
        for con in self.constraints:
            names.update(v for v, _ in con.coeffs)
        names.update(self.variables)
        for name in names:
            if name.startswith("p"):
                values[name] = p(int(name[1:]))
        return values


@dataclass(frozen=True)
class ConstraintEval:
    tag: str
    lhs: Fraction
    rhs: Fraction

    @property
    def slack(self) -> Fraction:
        return self.rhs - self.lhs

    @property
    def violated(self) -> bool:
        return self.slack < 0

    @property
    def tight(self) -> bool:
        return self.slack == 0


@dataclass(frozen=True)
class FeasibilityReport:
    evaluations: tuple[ConstraintEval, ...]

    @property
    def violations(self) -> tuple[ConstraintEval, ...]:
        return tuple(e for e in self.evaluations if e.violated)

    @property
    def tight(self) -> tuple[ConstraintEval, ...]:
        return tuple(e for e in self.evaluations if e.tight)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_feasible(p: FlipParams, kappa, program: LPProgram) -> FeasibilityReport:
    """Exact evaluation of every program constraint at (p, kappa)."""
    values = program.values_from(p, kappa)
    evals = []
    for name, fixed_val in sorted(program.fixed.items()):
        if name == KAPPA:
            continue
        evals.append(ConstraintEval(f"fixed:{name}", values[name] - fixed_val, Fraction(0)))
        evals.append(ConstraintEval(f"fixed:{name}(-)", fixed_val - values[name], Fraction(0)))
    for con in program.constraints:
        evals.append(ConstraintEval(con.tag, con.lhs(values), con.rhs))
    return FeasibilityReport(tuple(evals))


# ---------------------------------------------------------------------------
# program generators


def _monotone_rows(max_index: int) -> list[LinearConstraint]:
    rows = []
    for ell in range(1, max_index):
        rows.append(
            LinearConstraint.make(
                {pvar(ell + 1): Fraction(1), pvar(ell): Fraction(-1)},
                0,
                f"monotone:p{ell + 1}<=p{ell}",
            )
        )
    return rows


def gen_reduced(kind: str) -> LPProgram:
    """The reduced program or its starred variant."""
    if kind not in ("P_red", "P*_red"):
        raise LPError("gen_reduced builds P_red or P*_red")
    starred = kind == "P*_red"
    rows: list[LinearConstraint] = []
    for i in range(1, 7):
        for j in range(2, 7):
            if starred and (i, j) == (1, 2):
                continue
            coeffs: dict[str, Fraction] = {}
            for ell, mult in ((i, Fraction(i)), (j, Fraction(j - 1))):
                coeffs[pvar(ell)] = coeffs.get(pvar(ell), Fraction(0)) + mult
                coeffs[pvar(ell + 1)] = coeffs.get(pvar(ell + 1), Fraction(0)) - mult
            coeffs[KAPPA] = Fraction(-1)
            rows.append(LinearConstraint.make(coeffs, -1, f"config-1:(i={i},j={j})"))
    for ell in (2, 3):
        if starred and ell == 3:
            continue
        coeffs = {
            pvar(ell): Fraction(2 * (ell - 1)),
            pvar(2 * ell + 1): Fraction(1),
            KAPPA: Fraction(-2),
        }
        rows.append(LinearConstraint.make(coeffs, -3, f"config-2:l={ell}"))
    rows.extend(_monotone_rows(7))
    fixed = {pvar(1): Fraction(1)}
    if starred:
        fixed[pvar(3)] = Fraction(1, 6)
        fixed[pvar(7)] = Fraction(0)
    variables = tuple(
        pvar(ell) for ell in range(2, 8) if pvar(ell) not in fixed
    ) + (KAPPA,)
    return LPProgram(kind, variables, tuple(rows), fixed)


EXTREMAL_PROFILES = (
    ((2,), (1,)),
    ((1,), (2,)),
    ((3, 3), (1, 1)),
    ((1, 1), (3, 3)),
)


def _profile_vectors(r: int, size_cap: int) -> Iterable[tuple[int, ...]]:
    """Realizable entry vectors: zeros mark repeats of an earlier component
    that already spans several neighbors, which forces some earlier entry
    of size at least 3."""
    for vec in itertools.product(range(size_cap + 1), repeat=r):
        if vec[0] == 0:
            continue
        ok = True
        for i, x in enumerate(vec):
            if x == 0 and max(vec[:i]) < 3:
                ok = False
                break
        if ok:
            yield vec


def _resolution_constraints(
    a: tuple[int, ...], b: tuple[int, ...]
) -> Iterable[LinearConstraint]:
    r = len(a)
    a_tot, b_tot = 1 + sum(a), 1 + sum(b)
    a_max, b_max = max(a), max(b)
    arg_a = [i for i, x in enumerate(a) if x == a_max]
    arg_b = [i for i, x in enumerate(b) if x == b_max]

    def sym_q(entries, total, maximum, i_star):
        # per-index coefficient map of q_i as a linear form in p
        forms = []
        for i, x in enumerate(entries):
            if i == i_star:
                forms.append({maximum: Fraction(1), total: Fraction(-1)})
            else:
                forms.append({x: Fraction(1)})
        return forms

    for i_a in arg_a:
        for i_b in arg_b:
            q_forms = sym_q(a, a_tot, a_max, i_a)
            qp_forms = sym_q(b, b_tot, b_max, i_b)
            for min_sides in itertools.product("ab", repeat=r):
                coeffs: dict[str, Fraction] = {}

                def add(form: dict[int, Fraction], mult: Fraction):
                    for idx, coef in form.items():
                        if idx <= 0:
                            continue
                        coeffs[pvar(idx)] = (
                            coeffs.get(pvar(idx), Fraction(0)) + mult * coef
                        )

                add({a_tot: Fraction(1)}, Fraction(a_tot - a_max - 1))
                add({b_tot: Fraction(1)}, Fraction(b_tot - b_max - 1))
                for i in range(r):
                    add(q_forms[i], Fraction(a[i]))
                    add(qp_forms[i], Fraction(b[i]))
                    add(q_forms[i] if min_sides[i] == "a" else qp_forms[i], Fraction(-1))
                coeffs[KAPPA] = Fraction(-r)
                yield LinearConstraint.make(
                    coeffs,
                    -1,
                    f"config-{r}:a={a},b={b},ia={i_a},ib={i_b},min={''.join(min_sides)}",
                )


def gen_config_constraints(
    r_max: int = 2, size_cap: int = 8, skip_extremal: bool = False
) -> tuple[LinearConstraint, ...]:
    """Every profile-derived constraint with r <= r_max, deduplicated.

    Entries of size >= 7 all put zero weight on a move for the certified
    parameter vectors, so capping entries at ``size_cap`` >= 8 loses no
    binding constraint; profiles of size zero impose none.
    """
    if r_max < 1:
        raise LPError("r_max must be at least 1")
    if size_cap < 7:
        raise LPError("size_cap below 7 would merge distinct constraints")
    seen = set()
    out: list[LinearConstraint] = []
    for r in range(1, r_max + 1):
        for a in _profile_vectors(r, size_cap):
            for b in _profile_vectors(r, size_cap):
                if skip_extremal and (a, b) in EXTREMAL_PROFILES:
                    continue
                for con in _resolution_constraints(a, b):
                    key = con.dedupe_key()
                    if key not in seen:
                        seen.add(key)
                        out.append(con)
    return tuple(out)


def gen_full(kind: str, r_max: int = 2, size_cap: int = 8) -> LPProgram:
    """The full configuration program (P) or its starred variant (P*)."""
    if kind not in ("P", "P*"):
        raise LPError("gen_full builds P or P*")
    starred = kind == "P*"
    rows = list(gen_config_constraints(r_max, size_cap, skip_extremal=starred))
    max_index = 1
    for con in rows:
        for v, _ in con.coeffs:
            if v.startswith("p"):
                max_index = max(max_index, int(v[1:]))
    rows.extend(_monotone_rows(max_index))
    fixed = {pvar(1): Fraction(1)}
    if starred:
        fixed[pvar(3)] = Fraction(1, 6)
        fixed[pvar(7)] = Fraction(0)
    variables = tuple(
        pvar(ell) for ell in range(2, max_index + 1) if pvar(ell) not in fixed
    ) + (KAPPA,)
    return LPProgram(kind, variables, tuple(rows), fixed)


def program_by_name(name: str, r_max: int = 2, size_cap: int = 8) -> LPProgram:
    if name in ("P_red", "P*_red"):
        return gen_reduced(name)
    if name in ("P", "P*"):
        return gen_full(name, r_max, size_cap)
    raise LPError(f"unknown program {name!r}")


# ---------------------------------------------------------------------------
# exact simplex


@dataclass(frozen=True)
class LPSolution:
    status: str
    values: dict[str, Fraction]
    objective: Fraction | None
    dual: tuple[Fraction, ...] | None
    tight_tags: tuple[str, ...]

    def flip_params(self) -> FlipParams:
        indices = [int(v[1:]) for v in self.values if v.startswith("p")]
        top = max(indices, default=1)
        vals = [self.values.get(pvar(ell), Fraction(0)) for ell in range(1, top + 1)]
        while len(vals) > 1 and vals[-1] == 0:
            vals.pop()
        return FlipParams(tuple(vals))


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    tableau[row] = [x / piv for x in tableau[row]]
    for r, line in enumerate(tableau):
        if r != row and line[col] != 0:
            factor = line[col]
            tableau[r] = [x - factor * y for x, y in zip(line, tableau[row])]
    basis[row] = col


def _reduced_costs(tableau, basis, costs, width):
    z = [Fraction(0)] * (width + 1)
    for r, bcol in enumerate(basis):
        cb = costs[bcol]
        if cb == 0:
            continue
        for j in range(width + 1):
            z[j] += cb * tableau[r][j]
    red = [costs[j] - z[j] for j in range(width)]
    return red, z[width]


def _bland_loop(tableau, basis, costs, width):
    while True:
        red, _ = _reduced_costs(tableau, basis, costs, width)
        enter = next((j for j in range(width) if red[j] < 0), None)
        if enter is None:
            return "optimal"
        best_row, best_key = None, None
        for r, line in enumerate(tableau):
            if line[enter] > 0:
                ratio = line[width] / line[enter]
                key = (ratio, basis[r])
                if best_key is None or key < best_key:
                    best_key, best_row = key, r
        if best_row is None:
            return "unbounded"
        _pivot(tableau, basis, best_row, enter)


def simplex_min(
    a_rows: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    c: Sequence[Fraction],
) -> tuple[str, list[Fraction] | None, list[Fraction] | None]:
    """min c.x s.t. a_rows . x <= b, x >= 0; returns (status, x, dual prices).

    Dual prices y satisfy y <= 0, c - A^T y >= 0, and c.x = y.b at optimum;
    callers should re-verify independently.
    """
    m, n = len(a_rows), len(c)
    width = n + m
    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    art_cols: list[int] = []
    for i in range(m):
        row = [Fraction(x) for x in a_rows[i]] + [Fraction(0)] * m + [Fraction(b[i])]
        row[n + i] = Fraction(1)
        tableau.append(row)
        basis.append(n + i)
    neg_rows = [i for i in range(m) if tableau[i][width] < 0]
    if neg_rows:
        for i in neg_rows:
            tableau[i] = [-x for x in tableau[i]]
        width_p1 = width + len(neg_rows)
        for r in range(m):
            rhs = tableau[r].pop()
            tableau[r].extend([Fraction(0)] * len(neg_rows))
            tableau[r].append(rhs)
        for idx, i in enumerate(neg_rows):
            col = width + idx
            tableau[i][col] = Fraction(1)
            basis[i] = col
            art_cols.append(col)
        phase1_costs = [Fraction(0)] * width_p1
        for col in art_cols:
            phase1_costs[col] = Fraction(1)
        status = _bland_loop(tableau, basis, phase1_costs, width_p1)
        _, obj1 = _reduced_costs(tableau, basis, phase1_costs, width_p1)
        if status != "optimal" or obj1 != 0:
            return "infeasible", None, None
        for r in range(m):
            if basis[r] in art_cols:
                piv_col = next(
                    (j for j in range(width) if tableau[r][j] != 0), None
                )
                if piv_col is None:
                    raise LPInternalError(
                        "artificial stuck on an all-zero row (redundant system)"
                    )
                _pivot(tableau, basis, r, piv_col)
        tableau = [row[:width] + [row[width_p1]] for row in tableau]
    costs = [Fraction(x) for x in c] + [Fraction(0)] * m
    status = _bland_loop(tableau, basis, costs, width)
    if status == "unbounded":
        return "unbounded", None, None
    x = [Fraction(0)] * n
    for r, bcol in enumerate(basis):
        if bcol < n:
            x[bcol] = tableau[r][width]
    red, _ = _reduced_costs(tableau, basis, costs, width)
    y = [-red[n + i] for i in range(m)]
    return "optimal", x, y


def verify_certificate(a_rows, b, c, x, y) -> None:
    """Exact primal/dual/strong-duality check for min c.x, Ax <= b, x >= 0."""
    m, n = len(a_rows), len(c)
    if any(xi < 0 for xi in x):
        raise LPInternalError("primal point has a negative coordinate")
    for i in range(m):
        if sum(a_rows[i][j] * x[j] for j in range(n)) > b[i]:
            raise LPInternalError(f"primal point violates row {i}")
    if any(yi > 0 for yi in y):
        raise LPInternalError("dual prices must be non-positive")
    for j in range(n):
        if c[j] - sum(a_rows[i][j] * y[i] for i in range(m)) < 0:
            raise LPInternalError(f"dual constraint {j} violated")
    primal = sum(c[j] * x[j] for j in range(n))
    dual = sum(y[i] * b[i] for i in range(m))
    if primal != dual:
        raise LPInternalError(f"duality gap: {primal} != {dual}")


def solve_exact(program: LPProgram) -> LPSolution:
    """Optimal basic solution of the program with a verified dual certificate."""
    variables = program.variables
    var_index = {v: j for j, v in enumerate(variables)}
    a_rows, b = [], []
    for con in program.constraints:
        row = [Fraction(0)] * len(variables)
        rhs = con.rhs
        for v, coef in con.coeffs:
            if v in var_index:
                row[var_index[v]] = coef
            elif v in program.fixed:
                rhs -= coef * program.fixed[v]
            else:
                raise LPError(f"constraint {con.tag} uses unknown variable {v}")
        a_rows.append(row)
        b.append(rhs)
    c = [Fraction(1) if v == program.objective else Fraction(0) for v in variables]
    status, x, y = simplex_min(a_rows, b, c)
    if status != "optimal":
        return LPSolution(status, {}, None, None, ())
    verify_certificate(a_rows, b, c, x, y)
    values = dict(program.fixed)
    values.update({v: x[j] for j, v in enumerate(variables)})
    tight = []
    for i, con in enumerate(program.constraints):
        lhs = sum(a_rows[i][j] * x[j] for j in range(len(variables)))
        if lhs == b[i]:
            tight.append(con.tag)
    return LPSolution("optimal", values, values[KAPPA], tuple(y), tuple(tight))


# ---------------------------------------------------------------------------
# side conditions and extremal enumeration


@dataclass(frozen=True)
class TriplesReport:
    """Side conditions guaranteeing profiles with r >= 3 stay non-binding."""

    ok: bool
    threshold: Fraction
    failures: tuple[str, ...]


def check_triples(p: FlipParams, kappa) -> TriplesReport:
    kappa = Fraction(kappa)
    threshold = Fraction(1, 4) - Fraction(3, 2) * (KAPPA_BASELINE - kappa)
    failures = []
    for i in p.support():
        if i * p(i) > 1:
            failures.append(f"i*p_i>1 at i={i}")
        if (i - 1) * p(i) > 2 * p(3):
            failures.append(f"(i-1)*p_i>2p_3 at i={i}")
        if (i - 2) * p(i) >= threshold:
            failures.append(f"(i-2)*p_i>=threshold at i={i}")
    anchor = p(1) + 2 * p(3)
    if anchor != Fraction(4, 3):
        failures.append(f"p_1+2p_3={anchor}!=4/3")
    elif anchor >= kappa:
        failures.append("p_1+2p_3>=kappa")
    return TriplesReport(not failures, threshold, tuple(failures))


@dataclass(frozen=True)
class ExtremalHit:
    a: tuple[int, ...]
    b: tuple[int, ...]
    value: Fraction
    symmetric: bool


def enumerate_extremal(
    p: FlipParams, kappa_ref=KAPPA_BASELINE, size_cap: int = 8
) -> tuple[ExtremalHit, ...]:
    """Profiles with r in {1, 2} whose drift bound meets r * kappa_ref - 1.

    Output is canonical up to the (a;b) <-> (b;a) swap, larger side first.
    Parameters must satisfy i p_i <= 1 and (i-1) p_i <= 2 p_3; size-zero
    profiles are non-binding by convention and are excluded.
    """
    kappa_ref = Fraction(kappa_ref)
    for i in p.support():
        if i * p(i) > 1 or (i - 1) * p(i) > 2 * p(3):
            raise LPError("parameters violate the drift-bound hypotheses")
    hits = []
    seen = set()
    for r in (1, 2):
        target = kappa_ref * r - 1
        for a in _profile_vectors(r, size_cap):
            for b in _profile_vectors(r, size_cap):
                canon = max((a, b), (b, a))
                if canon in seen:
                    continue
                conf = Configuration(
                    color=0,
                    a=a,
                    b=b,
                    a_total=1 + sum(a),
                    b_total=1 + sum(b),
                    neighbors=tuple(range(r)),
                )
                if hamming_drift_bound(conf, p) == target:
                    seen.add(canon)
                    hits.append(
                        ExtremalHit(canon[0], canon[1], target, symmetric=a != b)
                    )
    return tuple(sorted(hits, key=lambda h: (len(h.a), h.a, h.b)))
