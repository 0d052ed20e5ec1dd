//! Exact arithmetic: Q(√2) scalars, certified dyadic intervals, CNF ordinals.

pub mod expr;
pub mod interval;
pub mod ordinal;
pub mod scalar;

pub use expr::ClosedForm;
pub use interval::{interval_refine, CertifiedInterval};
pub use ordinal::{ord_compare, ord_kind, OrdinalCnf, OrdinalKind};
pub use scalar::{pow2, rat, ExactScalar};
