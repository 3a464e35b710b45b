//! Matrix classes into and out of the domain of `E`, operator norms and
//! measures of noncompactness.

mod class;
mod corollary;
mod hat;
mod norms;

pub use class::{class_check, class_conditions, ClassCondition, ClassReport, ConditionReport, Target};
pub use corollary::{corollary_c, corollary_c_prime};
pub use hat::{ehat, HatMatrix, HatRow, RowSupport};
pub use norms::{compactness_verdict, mnc_estimate, op_norm, Compactness, CompactnessReport, MncEstimate, OpNorm};
