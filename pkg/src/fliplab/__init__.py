"""Markov-chain laboratory for graph-coloring flip dynamics.

Exact-rational implementations of Glauber and flip dynamics (plain and
list-coloring variants), the one-step coupling of adjacent colorings with
its drift diagnostics, the extremal-configuration metric, and the linear
programs that pin down the flip parameters, together with a CLI harness.
"""

from .coupling import (
    JointCoupling,
    NablaReport,
    build_coupling,
    check_hamming_contraction,
    complement_beta_drift,
    hamming_drift_bound,
    nabla_report,
)
from .dynamics import (
    ChainResult,
    ChainRng,
    TransitionMatrix,
    exact_tv_curve,
    flip_list_step,
    flip_step,
    float_tv_curve,
    glauber_list_step,
    glauber_step,
    mixing_time,
    run_chain,
    transition_matrix,
    uniform_on_proper,
)
from .graphs import (
    Graph,
    GraphError,
    ListAssignment,
    count_proper,
    gen_complete,
    gen_cycle,
    gen_path,
    gen_random_regular,
    graph_to_text,
    is_proper,
    parse_graph,
    proper_colorings,
)
from .kempe import (
    ComponentMultiset,
    KempeComponent,
    component,
    enumerate_components,
    flip,
    is_flippable,
)
from .lp import (
    LPProgram,
    check_feasible,
    check_triples,
    enumerate_extremal,
    gen_config_constraints,
    gen_reduced,
    program_by_name,
    solve_exact,
)
from .metric import (
    AdjacentPair,
    Configuration,
    ExactMetric,
    Extremality,
    beta,
    classify,
    configuration,
    d_b,
    exact_distance,
    omega,
)
from .params import (
    KAPPA_BASELINE,
    KAPPA_IMPROVED,
    P_BASELINE,
    P_IMPROVED,
    FlipParams,
    default_gamma,
)

__version__ = "0.1.0"
