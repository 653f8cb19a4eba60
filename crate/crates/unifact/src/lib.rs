//! Finite-dimensional toolkit for Boolean algebras of type I factors.
//!
//! The crate builds factorizations of a finite Hilbert space `H = ⊗_p H_p`
//! indexed by subsets of the tensor sites, detects factorizable /
//! multiplicative / additive vectors relative to a unit, resolves the
//! commuting projection family into joint eigenspaces with subset labels,
//! and classifies unital factorizations onto discrete Fock form. A side
//! module collects the standalone numeric lemmas used by the theory
//! (dissecting-system product limits, Poisson-binomial dominance, the
//! classicality limit).
//!
//! Everything is dense, double precision and desk scale: ambient dimension
//! is capped at 4096 and the interesting instances live well below that.

pub mod algebra;
pub mod error;
pub mod factorization;
pub mod fock;
pub mod jacobi;
pub mod lemmas;
pub mod mat;
pub mod spectrum;
pub mod unital;

pub use algebra::{AlgebraBasis, FactorCertificate, SplitCertificate};
pub use error::{Error, Result};
pub use factorization::{FactorizationSpec, LawCheck, LawReport, SiteSpec};
pub use fock::FockSpace;
pub use mat::{MatrixC, Tolerance};
pub use spectrum::{SpectralPoint, SpectralProbability, SpectralResolution};
pub use unital::{UnitalSpec, VectorClassification};
