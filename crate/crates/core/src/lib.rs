//! Cut-rank connectivity and vertex-minor linking on graphs with at most 64
//! vertices.
//!
//! - [`gf2`]: bit-packed GF(2) matrices and rank.
//! - [`graph`]: graphs, local complementation, pivoting and the one-vertex
//!   reductions `G\v`, `G*v\v`, `G/v`.
//! - [`graph6`]: graph6 encoding.
//! - [`rankconn`]: cut-rank `ρ`, connectivity `κ(S,T)`, local connectivity.
//! - [`linking`]: which reductions keep one or two connectivities, separating
//!   chains and the search for a vertex with two good reductions.

pub mod gf2;
pub mod graph;
pub mod graph6;
pub mod linking;
pub mod rankconn;
pub mod report;
pub mod vertex_set;

pub use gf2::{GF2Matrix, MatrixError};
pub use graph::{Graph, GraphError, ReductionKind, DEFAULT_ORBIT_BUDGET};
pub use graph6::Graph6Error;
pub use linking::{
    find_doubly_good_vertex, find_via_terminal_reduction, is_flexible, joint_good_options,
    doubly_good_bound, nesting_step, single_pair_options, pivot_only_options, reduce_preserving,
    separating_chain, LinkingError, LinkingInstance, NestingOutcome, OptionSet, Reduction,
    SeparatingChain,
};
pub use rankconn::{
    cut_rank, is_separating, kappa, kappa_bruteforce, local_conn, shrink_terminals, ConnError,
    HalfInt, KappaResult,
};
pub use report::ViolationReport;
pub use vertex_set::{Vertex, VertexSet, MAX_VERTICES};
