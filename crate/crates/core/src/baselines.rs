//! Comparison designs: principal points by Lloyd's algorithm, Ward-linkage
//! hierarchical clustering centroids, and a greedy set-cover stand-in for the
//! exact covering integer program.

use log::debug;

use crate::error::{Error, Result};
use crate::lds::CandidateSet;
use crate::mmc::{cluster_loop, CenterRule, ClusteringRun, Design};
use crate::par;
use crate::points::{dist2, PointSet};

/// Largest candidate set accepted by [`fff_ward`].
pub const WARD_MAX: usize = 20_000;
/// Candidate budget the command line uses for [`fff_ward`].
pub const WARD_BUDGET: usize = 2_000;
/// Largest candidate set accepted by [`greedy_cover`] (it stores all pairwise
/// distances).
pub const COVER_MAX: usize = 5_000;
/// Candidate budget the command line uses for [`greedy_cover`].
pub const COVER_BUDGET: usize = 1_000;
/// Radius quantiles tried before bisection in [`greedy_cover`].
const SCAN_STEPS: usize = 64;

/// Lloyd's algorithm: nearest assignment alternating with cluster means,
/// until no point moves by `eps` or `t_max` iterations. The trace holds the
/// mean squared distance to the nearest design point.
pub fn lloyd(candidates: &CandidateSet, init: &Design, t_max: usize, eps: f64) -> Result<ClusteringRun> {
    cluster_loop(candidates, init, CenterRule::Mean, 2.0, eps, t_max)
}

/// Ward clustering of the candidates into `n` groups.
#[derive(Clone, Debug)]
pub struct WardRun {
    /// Group centroids, ordered by each group's lowest candidate index.
    pub design: Design,
    /// Candidate index to group index.
    pub labels: Vec<usize>,
    /// Heights of all `N - 1` merges in agglomeration order.
    pub heights: Vec<f64>,
}

struct Cluster {
    centroid: Vec<f64>,
    size: usize,
}

/// Increase in within-group sum of squares when merging `a` and `b`.
fn ward_cost(a: &Cluster, b: &Cluster) -> f64 {
    let (na, nb) = (a.size as f64, b.size as f64);
    na * nb / (na + nb) * dist2(&a.centroid, &b.centroid)
}

/// Full Ward dendrogram by the nearest-neighbor chain: returns merges
/// `(a, b, height)` sorted by height, where `a`, `b` are candidate indices
/// representing the two merged groups.
fn ward_merges(points: &PointSet) -> Vec<(usize, usize, f64)> {
    let n = points.len();
    let mut clusters: Vec<Option<Cluster>> =
        points.rows().map(|r| Some(Cluster { centroid: r.to_vec(), size: 1 })).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut chain: Vec<usize> = Vec::new();
    while active.len() > 1 {
        if chain.is_empty() {
            chain.push(active[0]);
        }
        let top = *chain.last().unwrap();
        let prev = chain.len().checked_sub(2).map(|i| chain[i]);
        let c = clusters[top].as_ref().unwrap();
        let mut best = (f64::INFINITY, usize::MAX);
        if let Some(p) = prev {
            best = (ward_cost(c, clusters[p].as_ref().unwrap()), p);
        }
        for &o in &active {
            if o == top || Some(o) == prev {
                continue;
            }
            let d = ward_cost(c, clusters[o].as_ref().unwrap());
            if d < best.0 || (d == best.0 && prev.is_none() && o < best.1) {
                best = (d, o);
            }
        }
        let (height, nn) = best;
        if Some(nn) == prev {
            chain.pop();
            chain.pop();
            let (a, b) = (top.min(nn), top.max(nn));
            let cb = clusters[b].take().unwrap();
            let ca = clusters[a].as_mut().unwrap();
            let total = (ca.size + cb.size) as f64;
            for (x, y) in ca.centroid.iter_mut().zip(&cb.centroid) {
                *x = (*x * ca.size as f64 + y * cb.size as f64) / total;
            }
            ca.size += cb.size;
            active.retain(|&i| i != b);
            merges.push((a, b, height));
        } else {
            chain.push(nn);
        }
    }
    merges.sort_by(|x, y| x.2.total_cmp(&y.2));
    merges
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Ward-linkage agglomeration of the candidates down to `n` groups; the
/// design is the group centroids.
pub fn fff_ward(candidates: &CandidateSet, n: usize) -> Result<WardRun> {
    let count = candidates.len();
    if count > WARD_MAX {
        return Err(Error::TooLarge { what: "Ward clustering candidates (subsample first)", n: count, limit: WARD_MAX });
    }
    if n == 0 || n > count {
        return Err(Error::InvalidConfig(format!("design size must be in 1..={count}, got {n}")));
    }
    let pts = candidates.points();
    let merges = ward_merges(pts);
    let mut parent: Vec<usize> = (0..count).collect();
    for &(a, b, _) in &merges[..count - n] {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut group_of_root = vec![usize::MAX; count];
    let mut labels = vec![0; count];
    let mut sums: Vec<(Vec<f64>, usize)> = Vec::with_capacity(n);
    for j in 0..count {
        let r = find(&mut parent, j);
        if group_of_root[r] == usize::MAX {
            group_of_root[r] = sums.len();
            sums.push((vec![0.0; pts.dim()], 0));
        }
        let g = group_of_root[r];
        labels[j] = g;
        sums[g].0.iter_mut().zip(pts.row(j)).for_each(|(s, v)| *s += v);
        sums[g].1 += 1;
    }
    let mut design = PointSet::zeros(0, pts.dim());
    for (s, m) in &sums {
        let c: Vec<f64> = s.iter().map(|v| v / *m as f64).collect();
        design.push(&c);
    }
    debug!("Ward clustering: {count} candidates into {n} groups");
    Ok(WardRun { design: Design::new(design)?, labels, heights: merges.iter().map(|m| m.2).collect() })
}

/// Greedy covering design.
#[derive(Clone, Debug)]
pub struct CoverRun {
    pub design: Design,
    /// Covering radius at which the greedy cover needed at most `n` balls.
    pub radius: f64,
    /// Balls used by that cover before padding.
    pub cover_size: usize,
}

/// Greedy set cover of the candidates by balls of radius `sqrt(r2)`
/// centered at candidates. Gives up once more than `limit` balls are
/// needed.
///
/// Each step takes the uncovered candidate contained in the fewest balls and
/// covers it with the ball, among those containing it, that covers the most
/// uncovered candidates (lowest index on ties). Picking the largest ball
/// outright tends to cover the middle of the region first and strand its
/// corners.
fn greedy_at(d2: &[f64], count: usize, r2: f64, limit: usize) -> Option<Vec<usize>> {
    let within = |a: usize, b: usize| d2[a * count + b] <= r2;
    let mut gain: Vec<usize> = par::map_range(count, |j| (0..count).filter(|&i| within(j, i)).count());
    let freq = gain.clone();
    let mut covered = vec![false; count];
    let mut left = count;
    let mut chosen = Vec::new();
    while left > 0 {
        if chosen.len() == limit {
            return None;
        }
        let mut hard = usize::MAX;
        for e in 0..count {
            if !covered[e] && (hard == usize::MAX || freq[e] < freq[hard]) {
                hard = e;
            }
        }
        let mut best = usize::MAX;
        for j in 0..count {
            if within(j, hard) && (best == usize::MAX || gain[j] > gain[best]) {
                best = j;
            }
        }
        chosen.push(best);
        for e in 0..count {
            if !covered[e] && within(best, e) {
                covered[e] = true;
                left -= 1;
                for (j, g) in gain.iter_mut().enumerate() {
                    if within(j, e) {
                        *g -= 1;
                    }
                }
            }
        }
    }
    Some(chosen)
}

/// Search over the candidate pairwise distances for the smallest radius
/// whose greedy cover uses at most `n` balls; the cover is padded to exactly
/// `n` points with farthest-point additions.
pub fn greedy_cover(candidates: &CandidateSet, n: usize) -> Result<CoverRun> {
    let count = candidates.len();
    if count > COVER_MAX {
        return Err(Error::TooLarge { what: "greedy cover candidates (subsample first)", n: count, limit: COVER_MAX });
    }
    if n == 0 || n > count {
        return Err(Error::InvalidConfig(format!("design size must be in 1..={count}, got {n}")));
    }
    let pts = candidates.points();
    let d2: Vec<f64> = par::map_range(count * count, |e| dist2(pts.row(e / count), pts.row(e % count)));
    let mut radii: Vec<f64> = (0..count).flat_map(|a| (a + 1..count).map(move |b| (a, b))).map(|(a, b)| d2[a * count + b]).collect();
    radii.push(0.0);
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    // Greedy cover size is not monotone in the radius, so a coarse scan over
    // radius quantiles brackets the first success before bisecting.
    let top = radii.len() - 1;
    let grid: Vec<usize> = (0..=SCAN_STEPS).map(|k| k * top / SCAN_STEPS).collect();
    let scan = par::map_range(grid.len(), |k| greedy_at(&d2, count, radii[grid[k]], n));
    let first = scan.iter().position(|c| c.is_some()).expect("one ball covers everything");
    let mut best = scan[first].clone().unwrap();
    let (mut lo, mut hi) = (if first > 0 { grid[first - 1] + 1 } else { 0 }, grid[first]);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match greedy_at(&d2, count, radii[mid], n) {
            Some(c) => {
                hi = mid;
                best = c;
            }
            None => lo = mid + 1,
        }
    }
    let radius = radii[hi].sqrt();
    let cover_size = best.len();
    let mut far: Vec<f64> = (0..count).map(|e| best.iter().map(|&c| d2[c * count + e]).fold(f64::INFINITY, f64::min)).collect();
    while best.len() < n {
        let (_, j) = par::argmax(count, |e| far[e]).expect("non-empty candidates");
        best.push(j);
        for (e, f) in far.iter_mut().enumerate() {
            *f = f.min(d2[j * count + e]);
        }
    }
    let design = pts.select(&best);
    debug!("greedy cover: radius {radius:.6} with {cover_size} ball(s), padded to {n}");
    Ok(CoverRun { design: Design::new(design)?, radius, cover_size })
}
