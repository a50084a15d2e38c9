//! Orlicz and Besov–Orlicz norms on the torus, the dyadic Fejér
//! decomposition, and numerical checks of the embedding, sampling and
//! extrapolation inequalities built on them.

pub mod auxlemmas;
pub mod besov;
pub mod conditions;
pub mod error;
pub mod extrapolation;
pub mod luxemburg;
pub mod quad;
pub mod report;
pub mod roots;
pub mod sampling;
pub mod special;
pub mod trig;
pub mod weight;
pub mod young;

pub use auxlemmas::{BallPair, Measure, SymmdiffMethod};
pub use besov::{BesovParams, BesovValue};
pub use conditions::{ConditionEvaluation, SupResult, TailOptions};
pub use error::{Error, Result};
pub use extrapolation::{BoundProfile, BucketDecomposition, Convergence, EndpointIntegral, ProfileFn};
pub use luxemburg::{NormEstimate, NormOptions};
pub use report::{ConditionReport, Inequality, VerificationReport};
pub use sampling::{CoefficientLaw, SamplingCheck, SamplingSummary};
pub use trig::{Frame, TrigPoly};
pub use weight::{Weight, WeightSpec};
pub use young::{YoungFunction, YoungSpec};
