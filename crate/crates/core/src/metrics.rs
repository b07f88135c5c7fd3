//! Design quality measures: the minimax distance with its witness, and the
//! projected space-filling measures `mM_k`, `avg_k`, `Mm_k` taken over every
//! coordinate subset of size `k`.
//!
//! Suprema and integrals over the region are replaced by the maximum and the
//! average over a candidate set.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lds::CandidateSet;
use crate::maxpro::{per_point_minimax, SlackProfile};
use crate::mmc::{check_design, nearest, Design};
use crate::par::{self, CHUNK};
use crate::points::PointSet;

/// Largest number of coordinate subsets enumerated for one `k`.
pub const MAX_SUBSETS: usize = 100_000;

/// The minimax distance of a design together with where it is attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimax {
    pub distance: f64,
    /// Candidate farthest from the design (lowest index on ties).
    pub witness: usize,
    pub witness_point: Vec<f64>,
    /// Design point nearest to the witness.
    pub nearest: usize,
    pub nearest_point: Vec<f64>,
}

/// `max_j min_i ||y_j - m_i||` over the candidates, with the achieving
/// candidate index.
pub fn minimax_criterion(design: &Design, candidates: &CandidateSet) -> Result<(f64, usize)> {
    check_design(candidates, design)?;
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    Ok(minimax_points(candidates.points(), design.points()))
}

/// [`minimax_criterion`] with the witness and its nearest design point.
pub fn minimax_detail(design: &Design, candidates: &CandidateSet) -> Result<Minimax> {
    let (distance, witness) = minimax_criterion(design, candidates)?;
    let y = candidates.row(witness);
    let (i, _) = nearest(y, design.points());
    Ok(Minimax {
        distance,
        witness,
        witness_point: y.to_vec(),
        nearest: i,
        nearest_point: design.row(i).to_vec(),
    })
}

pub(crate) fn minimax_points(cands: &PointSet, design: &PointSet) -> (f64, usize) {
    let (d2, j) = par::argmax(cands.len(), |j| nearest(cands.row(j), design).1).expect("non-empty candidates");
    (d2.sqrt(), j)
}

/// The minimax distance if it is strictly below `bound`, otherwise `None`.
///
/// Stops scanning as soon as one candidate is at least `bound` away from
/// the design, so rejecting a poor design is cheap. The returned value is
/// identical to [`minimax_criterion`].
pub fn minimax_below(cands: &PointSet, design: &PointSet, bound: f64) -> Option<f64> {
    let n = cands.len();
    let hit = AtomicBool::new(false);
    let over = |d2: f64| d2.sqrt() >= bound;
    let partial = par::map_range(n.div_ceil(CHUNK), |c| {
        let mut best = 0.0f64;
        for j in c * CHUNK..((c + 1) * CHUNK).min(n) {
            if hit.load(Ordering::Relaxed) {
                return f64::INFINITY;
            }
            let d2 = nearest(cands.row(j), design).1;
            if d2 > best {
                best = d2;
                if over(d2) {
                    hit.store(true, Ordering::Relaxed);
                    return f64::INFINITY;
                }
            }
        }
        best
    });
    if hit.load(Ordering::Relaxed) {
        return None;
    }
    let h = partial.into_iter().fold(0.0, f64::max).sqrt();
    (h < bound).then_some(h)
}

/// `C(p, k)`, saturating.
pub fn binomial(p: usize, k: usize) -> usize {
    if k > p {
        return 0;
    }
    let k = k.min(p - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (p - i) as u128 / (i + 1) as u128;
        if c > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    c as usize
}

/// All size-`k` subsets of `0..p` in lexicographic order.
pub fn coordinate_subsets(p: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(p, k));
    if k == 0 || k > p {
        return out;
    }
    let mut s: Vec<usize> = (0..k).collect();
    loop {
        out.push(s.clone());
        let Some(i) = (0..k).rev().find(|&i| s[i] < p - k + i) else {
            return out;
        };
        s[i] += 1;
        for t in i + 1..k {
            s[t] = s[t - 1] + 1;
        }
    }
}

fn project(points: &PointSet, coords: &[usize]) -> PointSet {
    let mut data = Vec::with_capacity(points.len() * coords.len());
    for r in points.rows() {
        data.extend(coords.iter().map(|&c| r[c]));
    }
    PointSet::new(coords.len(), data).expect("projection keeps the row length")
}

/// Projected measures for one subspace dimension, each with the coordinate
/// subset attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMetrics {
    pub k: usize,
    /// Worst projected harmonic-mean covering distance (smaller is better).
    #[serde(rename = "mM")]
    pub m_m: f64,
    #[serde(rename = "mM_subset")]
    pub m_m_subset: Vec<usize>,
    /// Worst projected average distance to the nearest design point
    /// (smaller is better).
    pub avg: f64,
    pub avg_subset: Vec<usize>,
    /// Worst projected harmonic-mean separation (larger is better).
    #[serde(rename = "Mm")]
    pub mm: f64,
    #[serde(rename = "Mm_subset")]
    pub mm_subset: Vec<usize>,
}

/// `{(1/n) sum_i d_i^{-2k}}^{-1/(2k)}` evaluated relative to the smallest
/// distance so large exponents cannot overflow. A zero distance gives 0.
fn harmonic_covering(d2: &[f64], k: usize) -> f64 {
    let dmin2 = d2.iter().cloned().fold(f64::INFINITY, f64::min);
    if dmin2 == 0.0 {
        return 0.0;
    }
    let kk = k as f64;
    let s: f64 = d2.iter().map(|&d| (dmin2 / d).powf(kk)).sum::<f64>() / d2.len() as f64;
    dmin2.sqrt() * s.powf(-1.0 / (2.0 * kk))
}

/// `(1/C(n,2)) {sum_{i<j} d_ij^{-2k}}^{-1/(2k)}`; 0 with a duplicated point.
fn harmonic_separation(points: &PointSet, k: usize) -> f64 {
    let n = points.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let mut d2 = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d2.push(crate::points::dist2(points.row(i), points.row(j)));
        }
    }
    let dmin2 = d2.iter().cloned().fold(f64::INFINITY, f64::min);
    if dmin2 == 0.0 {
        return 0.0;
    }
    let kk = k as f64;
    let s: f64 = d2.iter().map(|&d| (dmin2 / d).powf(kk)).sum();
    dmin2.sqrt() * s.powf(-1.0 / (2.0 * kk)) / d2.len() as f64
}

/// Covering-type measures of one projection: `(sup_x harmonic covering,
/// mean_x nearest distance)` over the projected candidates.
fn covering_pair(cands: &PointSet, design: &PointSet, k: usize) -> (f64, f64) {
    let n = cands.len();
    let parts = par::map_range(n.div_ceil(CHUNK), |c| {
        let mut buf = vec![0.0; design.len()];
        let (mut sup, mut total) = (0.0f64, 0.0);
        for j in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let y = cands.row(j);
            let mut dmin2 = f64::INFINITY;
            for (b, m) in buf.iter_mut().zip(design.rows()) {
                *b = crate::points::dist2(y, m);
                dmin2 = dmin2.min(*b);
            }
            sup = sup.max(harmonic_covering(&buf, k));
            total += dmin2.sqrt();
        }
        (sup, total)
    });
    let sup = parts.iter().map(|p| p.0).fold(0.0, f64::max);
    let total: f64 = parts.iter().map(|p| p.1).sum();
    (sup, total / n as f64)
}

/// `mM_k`, `avg_k` and `Mm_k` over all `C(p, k)` coordinate projections.
///
/// `mM_k` and `avg_k` take the worst (largest) subspace, `Mm_k` the worst
/// (smallest).
pub fn projection_metrics(design: &Design, candidates: &CandidateSet, k: usize) -> Result<ProjectionMetrics> {
    check_design(candidates, design)?;
    let p = design.dim();
    if k == 0 || k > p {
        return Err(Error::InvalidConfig(format!("projection dimension must be in 1..={p}, got {k}")));
    }
    let count = binomial(p, k);
    if count > MAX_SUBSETS {
        return Err(Error::TooLarge { what: "coordinate subsets", n: count, limit: MAX_SUBSETS });
    }
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut out = ProjectionMetrics {
        k,
        m_m: f64::NEG_INFINITY,
        m_m_subset: vec![],
        avg: f64::NEG_INFINITY,
        avg_subset: vec![],
        mm: f64::INFINITY,
        mm_subset: vec![],
    };
    for r in coordinate_subsets(p, k) {
        let pd = project(design.points(), &r);
        let pc = project(candidates.points(), &r);
        let (sup, avg) = covering_pair(&pc, &pd, k);
        let sep = harmonic_separation(&pd, k);
        if sup > out.m_m {
            out.m_m = sup;
            out.m_m_subset = r.clone();
        }
        if avg > out.avg {
            out.avg = avg;
            out.avg_subset = r.clone();
        }
        if sep < out.mm {
            out.mm = sep;
            out.mm_subset = r;
        }
    }
    Ok(out)
}

/// Full evaluation of one design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub dim: usize,
    pub candidates: usize,
    pub minimax: Minimax,
    pub per_point: SlackProfile,
    pub projections: Vec<ProjectionMetrics>,
}

pub fn evaluate(design: &Design, candidates: &CandidateSet, proj_dims: &[usize]) -> Result<MetricsReport> {
    let minimax = minimax_detail(design, candidates)?;
    let per_point = per_point_minimax(design, candidates)?;
    let projections = proj_dims
        .iter()
        .map(|&k| projection_metrics(design, candidates, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport { n: design.len(), dim: design.dim(), candidates: candidates.len(), minimax, per_point, projections })
}

/// Mean distance from each candidate to its nearest design point.
pub fn average_distance(design: &Design, candidates: &CandidateSet) -> Result<f64> {
    check_design(candidates, design)?;
    let pts = candidates.points();
    Ok(par::sum(pts.len(), |j| nearest(pts.row(j), design.points()).1.sqrt()) / pts.len() as f64)
}
