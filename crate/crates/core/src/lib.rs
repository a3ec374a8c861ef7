//! Classical simulation of two-particle spin-`s` singlet correlations.
//!
//! Alice and Bob share random unit vectors, Alice sends `ceil(log2(s + 1))`
//! classical bits, and their outputs reproduce the uniform `2s + 1`-valued
//! marginals and the correlation `<alpha beta> = -s(s+1)/3 a.b` of spin
//! measurements `a.J` and `b.J` on the singlet.
//!
//! The crate contains the protocol itself ([`protocol`]), its exact output
//! law by enumeration ([`enumeration`]), the quantum-mechanical reference
//! ([`quantum`]), Monte Carlo statistics ([`stats`]) and the command
//! implementations behind the `singlet-sim` binary ([`harness`]).
//!
//! Geometry and the quantum reference are generic over [`scalar::Real`];
//! probability tables over [`scalar::Probability`], which includes exact
//! rationals. The aliases below fix the common choices.

pub mod chain;
pub mod direction;
pub mod enumeration;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod quantum;
pub mod random;
pub mod scalar;
pub mod spin;
pub mod stats;
pub mod table;

pub use chain::{build_chain, comm_cost, randomness_budget, BinaryChain, ChainStep, StepKind};
pub use direction::{Direction, Rotation};
pub use error::{Error, Result};
pub use protocol::{run_trial, run_trial_rotated, SharedRandomness, TrialOutcome};
pub use random::{sample_direction, sgn, RandomStream, DEFAULT_SEED};
pub use spin::{make_spin, HalfIntegerValue, SpinValue};
pub use table::{DistributionTable, JointDistribution};

/// Exact rational scalar for the enumeration oracle.
pub type Exact = num_rational::BigRational;

pub type Direction64 = Direction<f64>;
pub type Direction32 = Direction<f32>;
pub type Rotation64 = Rotation<f64>;
pub type SharedRandomness64 = SharedRandomness<f64>;

pub type JointDistribution64 = JointDistribution<f64>;
pub type ExactJointDistribution = JointDistribution<Exact>;
pub type DistributionTable64 = DistributionTable<f64>;
pub type ExactDistributionTable = DistributionTable<Exact>;

pub type SpinOperators64 = quantum::SpinOperators<f64>;
pub type SingletState64 = quantum::SingletState<f64>;
