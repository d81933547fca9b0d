//! Interpolation problems: Carathéodory–Schur, Nevanlinna–Pick, Sarason and commutative compressions.

pub mod commutative;
pub mod cs;
pub mod np;
pub mod sarason;

pub use cs::{cs_central, cs_distance, cs_matrix, cs_optimal, CSCentral, CSOptimal, CSProblem};
pub use np::{
    np_central, np_feasible, np_optimal_ball, permanence_extend, NPProblem, StateSpaceInterpolant,
};
pub use sarason::{sarason_central, HSpec, SarasonCentral};
