//! Winding constructions on `S = {s_j} ∪ {s_∞}` in the plane.

pub mod glue;
pub mod harmonic;
pub mod neighborhood;
pub mod number;
pub mod primes;
pub mod standard;
pub mod tower;
pub mod x2;

pub use glue::{build_limit_glue, ChainStep, LimitGlue};
pub use harmonic::{build_harmonic, Harmonic};
pub use neighborhood::{make_neighborhood_system, Cell, NeighborhoodSystem};
pub use number::{winding_number, FamilyCertificate, WindingCertificate};
pub use primes::{PrimeOp, PrimeStream};
pub use standard::{standard_s, StandardS};
pub use tower::{build_tower, tower_cap, LayerRef, Tower, TowerSpec};
pub use x2::{build_winding_x2, WindingX2, X2Params};

use crate::error::Result;
use crate::exactnum::OrdinalCnf;
use crate::space::{DynSystem, Point};

/// A winding construction that can itself be embedded into a tower level.
pub trait Layer: DynSystem {
    /// `u` when the point is attached to the cell of `s_u`: `s_u` itself or
    /// a wind point passing `s_u`.
    fn anchor(&self, p: &Point) -> Option<i64>;

    /// Radius of the outermost neighborhood system the layer lives in.
    fn r0(&self) -> u64;

    fn rank(&self) -> OrdinalCnf;

    /// Relative times `m` for which `T^m p` may leave `U(s_∞)` of `V_{r0}`.
    fn wind_window(&self, p: &Point) -> Option<(i64, i64)>;

    /// Re-verified winding certificates for the orbit families of the first
    /// `depth` levels.
    fn family_certificates(&self, depth: u32) -> Result<Vec<FamilyCertificate>>;
}
