"""Island-model (1+1) EA simulation and exact runtime analysis on
fork-style fitness landscapes, with block compositions and a scenario
harness producing deterministic CSV summaries."""

__version__ = "0.1.0"

from .analytic import (
    ChainSizeError,
    ExactChain,
    black_box_fork,
    build_chain,
    choose_sum_div,
    exact_lo_runtime,
    expected_hitting_time,
    geometric_min_bounds,
    hitting_probability,
    lo_block_runtime,
)
from .ea import EaRunResult, Mutator, ea_run, standard_bit_mutation
from .fitness import (
    BitString,
    BlockSum,
    FitnessFunction,
    Fork,
    LeadingBlocks,
    LeadingOnes,
    Masked,
    OneMax,
    build_fitness,
    masked_fork,
)
from .harness import (
    Rule,
    Scenario,
    fit_exponent,
    load_scenarios,
    run_scenario,
    valley_first_exact,
    valley_first_test,
    write_csv,
)
from .islands import (
    ALL_OPTIMAL,
    ANY_OPTIMAL,
    IslandConfig,
    IslandRun,
    RunRecord,
    RuntimeStats,
    island_run,
    monte_carlo_runtime,
)
from .topology import Topology, make_topology

__all__ = [
    "ALL_OPTIMAL",
    "ANY_OPTIMAL",
    "BitString",
    "BlockSum",
    "ChainSizeError",
    "EaRunResult",
    "ExactChain",
    "FitnessFunction",
    "Fork",
    "IslandConfig",
    "IslandRun",
    "LeadingBlocks",
    "LeadingOnes",
    "Masked",
    "Mutator",
    "OneMax",
    "Rule",
    "RunRecord",
    "RuntimeStats",
    "Scenario",
    "Topology",
    "black_box_fork",
    "build_chain",
    "build_fitness",
    "choose_sum_div",
    "ea_run",
    "exact_lo_runtime",
    "expected_hitting_time",
    "fit_exponent",
    "geometric_min_bounds",
    "hitting_probability",
    "island_run",
    "load_scenarios",
    "lo_block_runtime",
    "make_topology",
    "masked_fork",
    "monte_carlo_runtime",
    "run_scenario",
    "standard_bit_mutation",
    "valley_first_exact",
    "valley_first_test",
    "write_csv",
]
