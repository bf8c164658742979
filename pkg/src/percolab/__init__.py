"""Graph bootstrap percolation: closure dynamics, rooted densities, activation
certificates and random-graph threshold experiments."""

from .analysis import (
    CoreResult,
    RhoCertificate,
    alpha_core,
    is_alpha_dense,
    is_alpha_sparse,
    ladder,
    modified_core,
    rho_exact_special,
    rho_upper_bound,
)
from .density import (
    Balance,
    beta,
    is_balanced,
    lam,
    lambda_star,
    max_density,
    rho_max,
    rho_pair,
    two_density,
)
from .dynamics import (
    WGA,
    ClosureTrace,
    WitnessRecord,
    closure,
    dense_part,
    dense_parts,
    percolates,
    step,
    witness,
    wsat_bollobas,
)
from .embed import contains, enumerate_anchored_copies, find_copy
from .errors import PercolabError
from .extensions import FoldPlan, FoldReport, find_extension, fold_activate, prepare_fold
from .graph import (
    Graph,
    RootedPair,
    complete_graph,
    edge,
    empty_graph,
    parse_edge_list,
    parse_graph,
    parse_graph6,
    to_edge_list,
    to_graph6,
)
from .random_graphs import (
    PcEstimate,
    ProcessTrace,
    estimate_p_eps,
    estimate_pc,
    hitting_coincidence,
    hitting_time,
    lower_bound_experiment,
    sample_gnp,
    sharpness_report,
)

__version__ = "0.1.0"
