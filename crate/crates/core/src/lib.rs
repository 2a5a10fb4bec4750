//! Exact verification of squared-norm identities.
//!
//! An identity `Σ_{A⊆{1..n}} c_A ‖x_A‖² = 0`, with `x_A = Σ_{i∈A} x_i`, is
//! decided for all inner-product spaces of dimension at least two by reducing
//! it to pair and singleton terms ([`algebra`]). Invalid identities come with
//! a certificate and explicit rational witness vectors; valid ones can be
//! stress-tested under non-Euclidean norms ([`eval`]).

pub mod algebra;
pub mod dsl;
pub mod error;
pub mod eval;
pub mod families;
pub mod identity;
pub mod rational;
pub mod signed;
pub mod subset;

pub use algebra::{expand_to_pairs, make_witness, singleton_sums, verify, Certificate, ReducedForm, Verdict};
pub use error::Error;
pub use identity::PlainIdentity;
pub use rational::Rational;
pub use signed::{signed_to_plain, SignedIdentity, SignedTerm, WeightedFamily};
pub use subset::Subset;
