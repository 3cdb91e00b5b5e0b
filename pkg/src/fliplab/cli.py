"""Command-line harness: sampling, exact TV curves, drift scans, LP certificates.

Exit codes: 0 success / all checks pass, 1 check failures, 2 usage or parse
errors.  All subcommands are deterministic given their full flag set.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from fractions import Fraction

from .coupling import (
    CouplingError,
    build_coupling,
    check_hamming_contraction,
    nabla_report,
)
from .dynamics import (
    DynamicsError,
    exact_tv_curve,
    float_tv_curve,
    mixing_time,
    run_chain,
    transition_matrix,
)
from .graphs import (
    Graph,
    GraphError,
    ListAssignment,
    automorphisms,
    gen_complete,
    gen_cycle,
    gen_path,
    is_proper,
    parse_coloring,
    parse_graph,
    parse_lists,
    proper_colorings,
)
from .kempe import KempeError
from .lp import (
    LPError,
    check_feasible,
    check_triples,
    enumerate_extremal,
    program_by_name,
    solve_exact,
)
from .metric import AdjacentPair, MetricError
from .params import (
    KAPPA_BASELINE,
    KAPPA_IMPROVED,
    NAMED_PARAMS,
    FlipParams,
    ParamsError,
    default_gamma,
)

USAGE_ERROR = 2
CHECK_FAILURE = 1


def _load_graph(spec: str) -> Graph:
    for prefix, gen in (("cycle:", gen_cycle), ("complete:", gen_complete), ("path:", gen_path)):
        if spec.startswith(prefix):
            return gen(int(spec[len(prefix):]))
    with open(spec, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def _load_params(spec: str | None) -> FlipParams:
    if spec is None:
        raise ParamsError("this command needs --params (a name or a file)")
    if spec in NAMED_PARAMS:
        return NAMED_PARAMS[spec]
    with open(spec, "r", encoding="utf-8") as fh:
        return FlipParams.from_file_text(fh.read())


def _load_lists(path: str) -> ListAssignment:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_lists(fh.read())


def _greedy_start(g: Graph, k: int | None, lists: ListAssignment | None):
    colors = []
    for u in range(g.n):
        palette = range(k) if k is not None else lists[u]
        taken = {colors[w] for w in g.adjacency[u] if w < u}
        pick = next((c for c in palette if c not in taken), None)
        colors.append(pick if pick is not None else next(iter(palette)))
    return tuple(colors)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# sample


def _cmd_sample(args) -> int:
    g = _load_graph(args.graph)
    lists = _load_lists(args.lists) if args.lists else None
    k = args.k
    if (k is None) == (lists is None):
        print("pass exactly one of --k and --lists", file=sys.stderr)
        return USAGE_ERROR
    p = _load_params(args.params) if args.chain in ("flip", "flip-list") else None
    if args.start:
        with open(args.start, "r", encoding="utf-8") as fh:
            start = parse_coloring(fh.read(), g.n)
    else:
        start = _greedy_start(g, k, lists)
    t0 = time.perf_counter()
    result = run_chain(
        g, start, args.chain, args.steps, args.seed, k=k, lists=lists, p=p
    )
    wall = time.perf_counter() - t0
    width = k if k is not None else (lists.uniform_size or 0)
    horizon = (
        width * g.n * math.ceil(math.log(4 * g.n)) if width else ""
    )
    print("final " + " ".join(str(c) for c in result.final))
    print(f"proper {result.proper_final}")
    print(f"first_proper_step {result.first_proper_step}")
    print(f"steps {result.steps}")
    print(f"seed {args.seed}")
    print(f"horizon_steps {horizon}")
    print(f"wall_time_s {wall:.6f}")
    if args.out:
        _write_csv(
            args.out,
            [
                "final",
                "proper",
                "first_proper_step",
                "steps",
                "seed",
                "horizon_steps",
                "wall_time_s",
            ],
            [[
                " ".join(str(c) for c in result.final),
                int(result.proper_final),
                "" if result.first_proper_step is None else result.first_proper_step,
                result.steps,
                args.seed,
                horizon,
                f"{wall:.6f}",
            ]],
        )
    return 0


# ---------------------------------------------------------------------------
# tvdist


def _orbit_starts(g: Graph, states) -> list[int]:
    """One start index per orbit under graph automorphisms and color renaming."""
    try:
        autos = automorphisms(g)
    except GraphError:
        autos = [tuple(range(g.n))]

    def relabel(state):
        mapping: dict[int, int] = {}
        out = []
        for c in state:
            if c not in mapping:
                mapping[c] = len(mapping)
            out.append(mapping[c])
        return tuple(out)

    reps: dict[tuple, int] = {}
    for i, s in enumerate(states):
        canon = min(relabel(tuple(s[perm[u]] for u in range(g.n))) for perm in autos)
        reps.setdefault(canon, i)
    return sorted(reps.values())


def _cmd_tvdist(args) -> int:
    g = _load_graph(args.graph)
    p = _load_params(args.params) if args.chain == "flip" else None
    matrix = transition_matrix(g, args.chain, k=args.k, p=p, cap=args.cap)
    n_states = matrix.n_states
    mode = args.mode
    if mode == "auto":
        mode = "exact" if n_states <= 2000 else "float"
    starts = _orbit_starts(g, matrix.states) if args.orbits else None
    if mode == "exact":
        curve = exact_tv_curve(g, matrix, args.tmax, starts)
        error_bound = 0.0
        rows = [[t, str(v), float(v), 0.0] for t, v in enumerate(curve)]
    else:
        curve, error_bound = float_tv_curve(g, matrix, args.tmax, starts)
        rows = [[t, "", v, error_bound] for t, v in enumerate(curve)]
    tmix = mixing_time(curve)
    print(f"states {n_states}")
    print(f"mode {mode}")
    print(f"error_bound {error_bound}")
    print(f"t_mix_quarter {tmix}")
    if args.out:
        _write_csv(args.out, ["t", "tv_exact", "tv_float", "error_bound"], rows)
    if args.matrix_out:
        _write_csv(
            args.matrix_out,
            ["row_state", "col_state", "prob"],
            [[i, j, str(v)] for i, j, v in matrix.triplets()],
        )
    return 0


# ---------------------------------------------------------------------------
# nabla-scan


def _adjacent_proper_pairs(g: Graph, k: int):
    for sigma in proper_colorings(g, k):
        for v in range(g.n):
            for c in range(k):
                if c <= sigma[v]:
                    continue
                tau = list(sigma)
                tau[v] = c
                tau = tuple(tau)
                if is_proper(g, tau):
                    yield AdjacentPair(sigma, tau, v)


def _cmd_nabla_scan(args) -> int:
    g = _load_graph(args.graph)
    p = _load_params(args.params)
    gamma = (
        Fraction(args.gamma) if args.gamma else default_gamma(args.k, g.max_degree)
    )
    pairs = list(_adjacent_proper_pairs(g, args.k))
    if args.sample and args.sample < len(pairs):
        import numpy as np

        rng = np.random.Generator(np.random.Philox(key=[args.seed]))
        idx = rng.choice(len(pairs), size=args.sample, replace=False)
        pairs = [pairs[i] for i in sorted(int(x) for x in idx)]
    rows = []
    max_nabla = None
    min_margin = None
    from .params import P_IMPROVED

    is_tuned = all(p(i) == P_IMPROVED(i) for i in range(1, 8))
    for pair in pairs:
        coupling = build_coupling(g, pair, p, k=args.k)
        report = nabla_report(
            g, pair, p, k=args.k, gamma=gamma, mode=args.mode, coupling=coupling
        )
        margin = ""
        if is_tuned:
            _, slack = check_hamming_contraction(g, pair, args.k, p)
            margin = str(slack)
            min_margin = slack if min_margin is None else min(min_margin, slack)
        if report.nabla is not None:
            max_nabla = (
                report.nabla if max_nabla is None else max(max_nabla, report.nabla)
            )
        rows.append(
            [
                g.n,
                g.max_degree,
                args.k,
                pair.v,
                str(report.beta),
                str(report.nabla_h),
                "" if report.nabla_b is None else str(report.nabla_b),
                "" if report.nabla is None else str(report.nabla),
                report.mode,
                ";".join(report.flags),
                0,
                margin,
            ]
        )
    rows.append(
        [
            "SUMMARY",
            "",
            "",
            "",
            "",
            "",
            "",
            "" if max_nabla is None else str(max_nabla),
            args.mode,
            "",
            0,
            "" if min_margin is None else str(min_margin),
        ]
    )
    header = [
        "n",
        "max_degree",
        "k",
        "v",
        "beta",
        "nabla_H",
        "nabla_B",
        "nabla",
        "mode",
        "flags",
        "marginal_audit",
        "hamming_bound_margin",
    ]
    if args.out:
        _write_csv(args.out, header, rows)
    print(f"pairs {len(pairs)}")
    print(f"max_nabla {max_nabla}")
    print(f"min_hamming_bound_margin {min_margin}")
    return 0


# ---------------------------------------------------------------------------
# lp


def _default_kappa(params_spec: str | None):
    if params_spec == "baseline":
        return KAPPA_BASELINE
    if params_spec == "improved":
        return KAPPA_IMPROVED
    return None


def _cmd_lp(args) -> int:
    if args.action == "solve":
        if args.program not in ("P_red", "P*_red"):
            print("solve works on the reduced programs only", file=sys.stderr)
            return USAGE_ERROR
        program = program_by_name(args.program)
        solution = solve_exact(program)
        if solution.status != "optimal":
            print(f"status {solution.status}")
            return CHECK_FAILURE
        print("status optimal")
        print(f"kappa {solution.values['kappa']}")
        flip = solution.flip_params()
        print("p " + " ".join(str(v) for v in flip.values))
        if args.out:
            _write_csv(
                args.out,
                ["variable", "value"],
                [[v, str(x)] for v, x in sorted(solution.values.items())],
            )
        return 0

    p = _load_params(args.params or "improved")
    if args.action == "verify":
        kappa = Fraction(args.kappa) if args.kappa else _default_kappa(args.params)
        if kappa is None:
            print("--kappa is required with a parameter file", file=sys.stderr)
            return USAGE_ERROR
        program = program_by_name(args.program, args.r_max, args.size_cap)
        report = check_feasible(p, kappa, program)
        print(f"constraints {len(report.evaluations)}")
        print(f"violations {len(report.violations)}")
        for ev in report.violations[:20]:
            print(f"violated {ev.tag}: lhs {ev.lhs} > rhs {ev.rhs}")
        if args.out:
            _write_csv(
                args.out,
                ["constraint", "lhs", "rhs", "slack"],
                [[e.tag, str(e.lhs), str(e.rhs), str(e.slack)] for e in report.evaluations],
            )
        return 0 if report.ok else CHECK_FAILURE
    if args.action == "extremal":
        hits = enumerate_extremal(p, size_cap=args.size_cap)
        for h in hits:
            print(
                f"extremal a={','.join(map(str, h.a))} b={','.join(map(str, h.b))} "
                f"value {h.value} symmetric {h.symmetric}"
            )
        if args.out:
            _write_csv(
                args.out,
                ["a", "b", "value", "symmetric"],
                [
                    [" ".join(map(str, h.a)), " ".join(map(str, h.b)), str(h.value), int(h.symmetric)]
                    for h in hits
                ],
            )
        return 0
    if args.action == "trips":
        kappa = Fraction(args.kappa) if args.kappa else _default_kappa(args.params)
        if kappa is None:
            print("--kappa is required with a parameter file", file=sys.stderr)
            return USAGE_ERROR
        report = check_triples(p, kappa)
        print(f"threshold {report.threshold}")
        print(f"ok {report.ok}")
        for f in report.failures:
            print(f"failed {f}")
        return 0 if report.ok else CHECK_FAILURE
    print(f"unknown action {args.action}", file=sys.stderr)
    return USAGE_ERROR


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="fliplab",
        description="Markov-chain laboratory for graph-coloring flip dynamics",
    )
    sub = top.add_subparsers(dest="command", required=True)

    sample = sub.add_parser("sample", help="run a chain and report the final coloring")
    sample.add_argument("--graph", required=True)
    sample.add_argument("--k", type=int)
    sample.add_argument("--lists")
    sample.add_argument(
        "--chain",
        required=True,
        choices=["glauber", "flip", "glauber-list", "flip-list"],
    )
    sample.add_argument("--params")
    sample.add_argument("--steps", type=int, required=True)
    sample.add_argument("--seed", type=int, required=True)
    sample.add_argument("--start")
    sample.add_argument("--out")
    sample.set_defaults(func=_cmd_sample)

    tvdist = sub.add_parser("tvdist", help="exact TV distance curve to uniform")
    tvdist.add_argument("--graph", required=True)
    tvdist.add_argument("--k", type=int, required=True)
    tvdist.add_argument("--chain", required=True, choices=["glauber", "flip"])
    tvdist.add_argument("--params")
    tvdist.add_argument("--tmax", type=int, required=True)
    tvdist.add_argument("--mode", choices=["auto", "exact", "float"], default="auto")
    tvdist.add_argument("--cap", type=int, default=10**6)
    tvdist.add_argument("--orbits", action=argparse.BooleanOptionalAction, default=True)
    tvdist.add_argument("--out")
    tvdist.add_argument("--matrix-out")
    tvdist.set_defaults(func=_cmd_tvdist)

    nab = sub.add_parser("nabla-scan", help="drift reports over adjacent proper pairs")
    nab.add_argument("--graph", required=True)
    nab.add_argument("--k", type=int, required=True)
    nab.add_argument("--params", required=True)
    nab.add_argument("--gamma")
    nab.add_argument("--mode", choices=["hamming", "exact", "bound"], default="hamming")
    nab.add_argument("--sample", type=int)
    nab.add_argument("--seed", type=int, default=0)
    nab.add_argument("--out")
    nab.set_defaults(func=_cmd_nabla_scan)

    lp = sub.add_parser("lp", help="generate, certify, and solve the flip programs")
    lp.add_argument("action", choices=["verify", "solve", "extremal", "trips"])
    lp.add_argument("program", nargs="?", default="P*_red",
                    choices=["P", "P_red", "P*", "P*_red"])
    lp.add_argument("--params")
    lp.add_argument("--kappa")
    lp.add_argument("--r-max", type=int, default=2)
    lp.add_argument("--size-cap", type=int, default=8)
    lp.add_argument("--out")
    lp.set_defaults(func=_cmd_lp)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (
        GraphError,
        ParamsError,
        KempeError,
        DynamicsError,
        MetricError,
        CouplingError,
        LPError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
