//! Finite-horizon companion sets `Γ_δ[x]` (two-sided) and `Φ_δ[x]` (forward).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::{Delta, Point, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Forward,
    TwoSided,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Mode::Forward),
            "two-sided" | "two_sided" => Ok(Mode::TwoSided),
            _ => Err(Error::Parse(format!("unknown mode `{s}`"))),
        }
    }
}

/// Sentinel for "no separation inside the scanned window".
pub const NEVER: u32 = u32::MAX;

/// First separation time of `(x_i, x_j)`: the least `|m| ≤ horizon` (or `m ≥ 0`
/// in forward mode) with `d(T^m x_i, T^m x_j) > δ`.
pub fn separation_time(tr: &Truncation, i: usize, j: usize, delta: &Delta, horizon: u32, mode: Mode) -> Result<u32> {
    for m in 0..=horizon as i64 {
        let times: &[i64] = if m == 0 || mode == Mode::Forward { &[m] } else { &[m, -m] };
        for &t in times {
            if !tr.nodes_within(tr.orbit_node(i, t), tr.orbit_node(j, t), delta)? {
                return Ok(m as u32);
            }
        }
    }
    Ok(NEVER)
}

/// Pairwise separation times for every point of the truncation.
pub struct SeparationTable {
    n: usize,
    horizon: u32,
    times: Vec<u32>,
}

impl SeparationTable {
    pub fn build(tr: &Truncation, delta: &Delta, horizon: u32, mode: Mode) -> Result<Self> {
        check_horizon(tr, horizon)?;
        let n = tr.len();
        let mut times = vec![NEVER; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s = separation_time(tr, i, j, delta, horizon, mode)?;
                times[i * n + j] = s;
                times[j * n + i] = s;
            }
        }
        Ok(Self { n, horizon, times })
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.times[i * self.n + j]
    }

    /// Indices of the companions of `x_i` at horizon `h`.
    pub fn companions(&self, i: usize, h: u32) -> Vec<usize> {
        debug_assert!(h <= self.horizon);
        (0..self.n).filter(|&j| j == i || self.get(i, j) > h).collect()
    }

    pub fn count(&self, i: usize, h: u32) -> usize {
        (0..self.n).filter(|&j| j == i || self.get(i, j) > h).count()
    }

    /// Companion count of `x_i` among the points selected by `mask`.
    pub fn count_in(&self, i: usize, h: u32, mask: &[bool]) -> usize {
        (0..self.n).filter(|&j| mask[j] && (j == i || self.get(i, j) > h)).count()
    }
}

fn check_horizon(tr: &Truncation, horizon: u32) -> Result<()> {
    if horizon > tr.horizon() {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} exceeds the truncation horizon {}",
            tr.horizon()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CompanionReport {
    pub center: Point,
    pub delta: ExactScalar,
    pub horizon: u32,
    pub mode: Mode,
    pub members: Vec<Point>,
    /// Members unchanged from horizon `H − 1`.
    pub stable: bool,
}

pub fn companion_set(
    tr: &Truncation,
    x: &Point,
    delta: &ExactScalar,
    horizon: u32,
    mode: Mode,
) -> Result<CompanionReport> {
    check_horizon(tr, horizon)?;
    let i = tr.position(x).ok_or_else(|| Error::UnknownPoint(x.to_string()))?;
    let d = Delta::new(delta.clone())?;
    let mut members = Vec::new();
    let mut stable = true;
    for j in 0..tr.len() {
        let s = if i == j { NEVER } else { separation_time(tr, i, j, &d, horizon, mode)? };
        if s > horizon {
            members.push(tr.points()[j].clone());
        } else if s == horizon && horizon > 0 {
            stable = false;
        }
    }
    Ok(CompanionReport { center: x.clone(), delta: delta.clone(), horizon, mode, members, stable })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub horizon: u32,
    pub max_card: usize,
    pub witness: Point,
    pub members: Vec<Point>,
}

/// Maximum companion cardinality per horizon; the witness is the first point
/// (in id order) attaining it.
pub fn max_companion_profile(
    tr: &Truncation,
    delta: &ExactScalar,
    horizons: &[u32],
    mode: Mode,
) -> Result<Vec<ProfileRow>> {
    if tr.is_empty() || horizons.is_empty() {
        return Ok(Vec::new());
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("horizons must be strictly increasing".into()));
    }
    let top = *horizons.last().expect("nonempty");
    let table = SeparationTable::build(tr, &Delta::new(delta.clone())?, top, mode)?;
    Ok(profile_from_table(tr, &table, horizons))
}

pub fn profile_from_table(tr: &Truncation, table: &SeparationTable, horizons: &[u32]) -> Vec<ProfileRow> {
    horizons
        .iter()
        .map(|&h| {
            let (mut best, mut arg) = (0, 0);
            for i in 0..tr.len() {
                let c = table.count(i, h);
                if c > best {
                    best = c;
                    arg = i;
                }
            }
            let members = table.companions(arg, h).into_iter().map(|j| tr.points()[j].clone()).collect();
            ProfileRow { horizon: h, max_card: best, witness: tr.points()[arg].clone(), members }
        })
        .collect()
}
