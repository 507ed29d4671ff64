"""Approximate max-k-cover over implicitly defined hypergraphs."""

from .algo import (
    BudgetSpec,
    RunResult,
    SampleCapReached,
    bca,
    bca_fixed_guarantee,
    brute_force_opt,
    budgeted_bca,
    budgeted_dta,
    dta,
    full_sketch_greedy,
)
from .bounds import (
    GuaranteeParams,
    QualityBound,
    derive_params,
    f_df2d,
    f_lower,
    f_requirement,
    f_topk,
    f_upper,
    required_samples,
)
from .evaluation import CoverageEstimate, estimate_coverage
from .oracles import (
    DomSetOracle,
    ExplicitOracle,
    LandmarkOracle,
    ReplayOracle,
    RISOracle,
    load_graph,
    load_hypergraph,
)
from .sketch import BudgetExceeded, ReducedSketch, StepwiseHeap

__version__ = "0.1.0"
