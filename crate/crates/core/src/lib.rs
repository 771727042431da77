//! Exact lattice algorithms in general norms: enumeration, shortest and
//! closest vectors over convex bodies via ellipsoid coverings, and integer
//! programming feasibility by hyperplane branching.

pub mod body;
pub mod convex;
pub mod ellipsoid;
pub mod error;
pub mod instance;
pub mod ip;
pub mod lattice;
pub mod linalg;
pub mod mell;
pub mod norm;
pub mod oracle;
pub mod rational;
pub mod solvers;
pub mod voronoi;

pub use body::{Centering, ConcreteBody, ConvexBody, LpIndex, Separation};
pub use ellipsoid::{Ellipsoid, Parallelepiped};
pub use error::{Error, Result};
pub use instance::{BodySpec, Instance};
pub use ip::{IpResult, IpStatus};
pub use lattice::LatticeBasis;
pub use mell::{CoverBudget, Covering};
pub use norm::ExactNorm;
pub use oracle::BruteForceBudget;
pub use rational::{QVec, Q};
pub use solvers::{EnumCovering, SolveReport};
pub use voronoi::{EnumCap, InnerProduct, LatticePoint};
