//! Linear relaxations of the asymmetric traveling salesman problem.
//!
//! The crate evaluates and optimizes over the Dantzig-Fulkerson-Johnson (DFJ) and
//! Miller-Tucker-Zemlin (MTZ) relaxations, and lifts any DFJ-feasible arc vector to
//! MTZ node potentials by shortest paths in the graph weighted `(n-1) - n x_ij`.
//! When the lift hits a negative cycle, the cycle's node set is a violated subtour
//! elimination constraint.

pub mod dfj;
pub mod error;
pub mod experiments;
pub mod flow;
pub mod instance;
pub mod lift;
pub mod lp;
pub mod mtz;
pub mod rational;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
