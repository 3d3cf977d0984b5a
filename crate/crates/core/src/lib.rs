//! Irreducible rational factorization of sparse bivariate polynomials by
//! toric lifting and recombination.
//!
//! The pipeline reads the Newton polytope of `f`, factors the exterior facet
//! polynomials, lifts every facet factor to a power series over its residue
//! field, finds the rational factors as the left kernel of a residue-pairing
//! matrix and finally recovers each factor by solving a linear system on its
//! predicted Newton polytope.

pub mod bivariate;
pub mod cli_app;
pub mod exact_arith;
pub mod lifting;
pub mod polytope_fan;
pub mod recombine;
pub mod reconstruct;
pub mod unifactor;

pub use bivariate::SparseBivariate;
pub use cli_app::{run_pipeline, PipelineError, PipelineRun, RunConfig, RunReport};
pub use exact_arith::{Rat, RatMatrix, TruncSeries, UniPoly};
pub use lifting::LiftRecord;
pub use polytope_fan::{Facet, LatticePoint, LatticePolytope, RefinedFan};
pub use recombine::{RecombinationMatrix, RecombinationOutcome};
pub use reconstruct::{FactorCandidate, Factorization};
