//! Colouring algorithms: Perron-weighted local search for partition and list
//! colourings, the random tournament experiment, and exhaustive search.

mod colour;
pub mod exact;
pub mod experiment;
pub mod search;

pub use colour::{
    list_colouring, list_colouring_with_report, majority_colouring, partition_colouring,
    partition_colouring_with_report, uniform_capacities, InitialAssignment, SolveReport,
    SolverOptions,
};
pub use exact::{exact_min_colours, find_majority_colouring, DEFAULT_NODE_BUDGET};
pub use experiment::{random_three_colouring, trial_colouring, ExperimentReport};
pub use search::{LocalSearch, PairWeights, StepOutcome, DEFAULT_DELTA};
