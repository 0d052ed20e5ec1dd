//! Cover-based companion oracle: the largest `∩_{|m|≤H} T^{-m} A_m` over
//! all cover bisequences `(A_m)`, counted inside a small truncation.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::ExactScalar;
use crate::space::{Delta, Point, Truncation};

pub const MAX_POINTS: usize = 64;
pub const MAX_HORIZON: u32 = 8;

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub max_card: usize,
    pub members: Vec<Point>,
    pub cover_size: usize,
    /// Distinct partial intersections explored.
    pub explored: u64,
}

fn guard(tr: &Truncation, horizon: u32) -> Result<()> {
    if tr.len() > MAX_POINTS || horizon > MAX_HORIZON {
        return Err(Error::SizeGuard(format!(
            "oracle needs at most {MAX_POINTS} points and horizon {MAX_HORIZON}; got {} and {horizon}",
            tr.len()
        )));
    }
    if horizon > tr.horizon() {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} exceeds the truncation horizon {}",
            tr.horizon()
        )));
    }
    Ok(())
}

/// Nodes visited by the sample within `|m| ≤ horizon`, in node order.
fn used_nodes(tr: &Truncation, horizon: u32) -> Vec<usize> {
    let h = i64::from(horizon);
    let set: BTreeSet<usize> = (0..tr.len()).flat_map(|i| (-h..=h).map(move |m| tr.orbit_node(i, m))).collect();
    set.into_iter().collect()
}

struct Search<'a> {
    tr: &'a Truncation,
    times: Vec<i64>,
    /// Cover sets containing each node.
    owners: Vec<Vec<usize>>,
    best: Vec<usize>,
    explored: u64,
}

impl Search<'_> {
    fn run(&mut self, step: usize, ys: Vec<usize>) {
        self.explored += 1;
        if ys.len() <= self.best.len() {
            return;
        }
        if step == self.times.len() {
            self.best = ys;
            return;
        }
        let m = self.times[step];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut seen = BTreeSet::new();
        for &y in &ys {
            for &a in &self.owners[self.tr.orbit_node(y, m)] {
                if seen.insert(a) {
                    let g: Vec<usize> =
                        ys.iter().copied().filter(|&z| self.owners[self.tr.orbit_node(z, m)].contains(&a)).collect();
                    groups.push(g);
                }
            }
        }
        groups.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        groups.dedup();
        let mut kept: Vec<Vec<usize>> = Vec::new();
        for g in groups {
            // a subset of an explored branch cannot do better
            if !kept.iter().any(|k| g.iter().all(|x| k.binary_search(x).is_ok())) {
                kept.push(g);
            }
        }
        for g in kept {
            self.run(step + 1, g);
        }
    }
}

/// Exhaustive over bisequences of cover members for `|m| ≤ horizon`, with
/// branches cut when they cannot beat the current best.
pub fn cover_companion_oracle(tr: &Truncation, cover: &[Vec<Point>], horizon: u32) -> Result<OracleResult> {
    guard(tr, horizon)?;
    for p in tr.points() {
        if !cover.iter().any(|a| a.contains(p)) {
            return Err(Error::InvalidArgument(format!("cover misses {p}")));
        }
    }
    let mut owners = vec![Vec::new(); tr.node_count()];
    for (a, set) in cover.iter().enumerate() {
        for p in set {
            if let Some(n) = tr.node_of(p) {
                owners[n].push(a);
            }
        }
    }
    let mut times = vec![0];
    for m in 1..=i64::from(horizon) {
        times.extend([m, -m]);
    }
    let mut s = Search { tr, times, owners, best: Vec::new(), explored: 0 };
    s.run(0, (0..tr.len()).collect());
    Ok(OracleResult {
        max_card: s.best.len(),
        members: s.best.iter().map(|&i| tr.points()[i].clone()).collect(),
        cover_size: cover.len(),
        explored: s.explored,
    })
}

/// Maximal sets of diameter at most `delta` among the visited points.
pub fn clique_cover(tr: &Truncation, delta: &ExactScalar, horizon: u32) -> Result<Vec<Vec<Point>>> {
    guard(tr, horizon)?;
    let nodes = used_nodes(tr, horizon);
    let d = Delta::new(delta.clone())?;
    let n = nodes.len();
    let mut adj = vec![vec![false; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let close = tr.nodes_within(nodes[a], nodes[b], &d)?;
            adj[a][b] = close;
            adj[b][a] = close;
        }
    }
    let mut out = Vec::new();
    bron_kerbosch(&adj, Vec::new(), (0..n).collect(), Vec::new(), &mut out);
    let mut cover: Vec<Vec<Point>> = out
        .into_iter()
        .map(|c| {
            let mut pts: Vec<Point> = c.into_iter().map(|i| tr.node_point(nodes[i]).clone()).collect();
            pts.sort();
            pts
        })
        .collect();
    cover.sort();
    Ok(cover)
}

fn bron_kerbosch(adj: &[Vec<bool>], r: Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    let pivot =
        p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count()).expect("nonempty");
    let (mut p, mut x) = (p, x);
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Closed `delta`-balls around every visited point. Intersections along a
/// ball bisequence can exceed a companion set, so this only bounds it above.
pub fn ball_cover(tr: &Truncation, delta: &ExactScalar, horizon: u32) -> Result<Vec<Vec<Point>>> {
    guard(tr, horizon)?;
    let nodes = used_nodes(tr, horizon);
    let d = Delta::new(delta.clone())?;
    let mut cover = Vec::new();
    for &c in &nodes {
        let mut ball = Vec::new();
        for &q in &nodes {
            if tr.nodes_within(c, q, &d)? {
                ball.push(tr.node_point(q).clone());
            }
        }
        ball.sort();
        cover.push(ball);
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::analysis::{max_companion_profile, Mode};
    use crate::space::{truncate, IndexBounds};
    use crate::winding::{build_harmonic, standard_s};

    fn harmonic16() -> Truncation {
        truncate(Arc::new(build_harmonic()), &IndexBounds::new(1, 15, 0), 4).unwrap()
    }

    #[test]
    fn trivial_covers() {
        let tr = harmonic16();
        let all = vec![tr.points().to_vec(), tr.system().enumerate(&IndexBounds::new(1, 15, 0)).unwrap()];
        assert_eq!(cover_companion_oracle(&tr, &all, 4).unwrap().max_card, tr.len());
        let singles: Vec<Vec<Point>> = tr.points().iter().map(|p| vec![p.clone()]).collect();
        assert_eq!(cover_companion_oracle(&tr, &singles, 3).unwrap().max_card, 1);
    }

    #[test]
    fn cliques_match_companions() {
        let tr = harmonic16();
        let delta = ExactScalar::ratio(1, 8);
        let cover = clique_cover(&tr, &delta, 4).unwrap();
        let oracle = cover_companion_oracle(&tr, &cover, 4).unwrap();
        let prof = max_companion_profile(&tr, &delta, &[4], Mode::TwoSided).unwrap();
        assert_eq!(oracle.max_card, prof[0].max_card);
        assert_eq!(oracle.max_card, 9);
        let balls = ball_cover(&tr, &delta, 4).unwrap();
        assert!(cover_companion_oracle(&tr, &balls, 4).unwrap().max_card >= oracle.max_card);
    }

    #[test]
    fn guard_rejects_large_inputs() {
        let tr = truncate(Arc::new(standard_s()), &IndexBounds::symmetric(40, 0), 2).unwrap();
        assert!(matches!(clique_cover(&tr, &ExactScalar::ratio(1, 8), 2), Err(Error::SizeGuard(_))));
    }
}
