//! Minimax clustering.
//!
//! Lloyd's alternation with the cluster mean replaced by the `C_q` center:
//! assign every candidate to its nearest design point, then move each design
//! point to the `C_q` center of the candidates it owns. The objective
//! `h_q = 1/N sum_j min_i ||y_j - m_i||^q` never increases.

use log::debug;

use crate::cqcenter::{cq_center_flat, AgdConfig, SqPow};
use crate::error::{Error, Result};
use crate::lds::CandidateSet;
use crate::par;
use crate::points::{dist2, PointSet};
use crate::region::clip_in_place;

/// An unordered set of design points.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    points: PointSet,
}

impl Design {
    pub fn new(points: PointSet) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidConfig("a design needs at least one point".into()));
        }
        if !points.all_finite() {
            return Err(Error::NonFinite("design coordinates"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn into_points(self) -> PointSet {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// Set equality with coordinate tolerance `1e-12`.
    pub fn same_set(&self, other: &Design) -> bool {
        self.points.set_eq(&other.points, 1e-12)
    }
}

/// Nearest-design-point assignment of every candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// Index of the nearest design point for each candidate, lowest index on
    /// ties.
    pub owner: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
    /// Squared distance from each candidate to its owner.
    pub dist2: Vec<f64>,
}

impl Assignment {
    /// Candidate indices grouped by owner, ascending within each group.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = self.cluster_sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (j, &i) in self.owner.iter().enumerate() {
            groups[i].push(j);
        }
        groups
    }
}

pub(crate) fn check_design(candidates: &CandidateSet, design: &Design) -> Result<()> {
    if candidates.dim() != design.dim() {
        return Err(Error::DimensionMismatch { expected: candidates.dim(), got: design.dim() });
    }
    Ok(())
}

/// Index and squared distance of the design point nearest to `y`.
#[inline]
pub(crate) fn nearest(y: &[f64], design: &PointSet) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, m) in design.rows().enumerate() {
        let d = dist2(y, m);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Assigns every candidate to its nearest design point.
pub fn assign_nearest(candidates: &CandidateSet, design: &Design) -> Result<Assignment> {
    check_design(candidates, design)?;
    Ok(assign_points(candidates.points(), design.points()))
}

pub(crate) fn assign_points(cands: &PointSet, design: &PointSet) -> Assignment {
    let pairs = par::map_range(cands.len(), |j| nearest(cands.row(j), design));
    let mut cluster_sizes = vec![0; design.len()];
    let mut owner = Vec::with_capacity(pairs.len());
    let mut d2 = Vec::with_capacity(pairs.len());
    for (i, d) in pairs {
        cluster_sizes[i] += 1;
        owner.push(i);
        d2.push(d);
    }
    Assignment { owner, cluster_sizes, dist2: d2 }
}

/// `h_q = 1/N sum_j min_i ||y_j - m_i||^q`, the clustering surrogate of the
/// minimax criterion.
pub fn hq_objective(design: &Design, candidates: &CandidateSet, q: f64) -> Result<f64> {
    check_design(candidates, design)?;
    Ok(hq_points(candidates.points(), design.points(), q))
}

pub(crate) fn hq_points(cands: &PointSet, design: &PointSet, q: f64) -> f64 {
    let n = cands.len();
    let pw = SqPow::new(q);
    par::sum(n, |j| pw.of(nearest(cands.row(j), design).1)) / n as f64
}

pub(crate) fn hq_from_assignment(a: &Assignment, q: f64) -> f64 {
    let n = a.dist2.len();
    let pw = SqPow::new(q);
    par::sum(n, |j| pw.of(a.dist2[j])) / n as f64
}

/// How a cluster's representative is recomputed.
#[derive(Clone, Copy, Debug)]
pub(crate) enum CenterRule {
    Cq(AgdConfig),
    Mean,
}

/// Memo of the last center computed for each design slot, keyed by the exact
/// member list. Only skips recomputation; results are unchanged.
#[derive(Clone, Debug, Default)]
pub(crate) struct CenterCache {
    slots: Vec<Option<CacheSlot>>,
}

/// Member fingerprint, member count and the center computed for them.
type CacheSlot = (u64, usize, Vec<f64>);

fn fingerprint(members: &[usize]) -> u64 {
    let mut h: u64 = 0x243F_6A88_85A3_08D3;
    for &j in members {
        h = (h ^ j as u64).wrapping_mul(0x100_0000_01B3).rotate_left(29) ^ (h >> 17);
    }
    h
}

/// New design after one center update for the given assignment, and the
/// largest point displacement.
///
/// Each non-empty cluster moves to its center unless the old point already
/// scores better on that cluster (the iterative solver is inexact). Empty
/// clusters are re-seeded, in index order, at the candidate farthest from
/// the updated design. All points are clipped into the region.
pub(crate) fn update_centers(
    cands: &CandidateSet,
    design: &PointSet,
    assignment: &Assignment,
    rule: CenterRule,
    cache: Option<&mut CenterCache>,
) -> Result<(PointSet, f64)> {
    let p = design.dim();
    let n = design.len();
    let members = assignment.members();
    let cached: Vec<Option<CacheSlot>> = match &cache {
        Some(c) if c.slots.len() == n => c.slots.clone(),
        _ => vec![None; n],
    };
    let pts = cands.points();
    let results = par::map_range(n, |i| -> Result<Option<(Vec<f64>, Option<CacheSlot>)>> {
        let idx = &members[i];
        if idx.is_empty() {
            return Ok(None);
        }
        let mut flat = Vec::with_capacity(idx.len() * p);
        for &j in idx {
            flat.extend_from_slice(pts.row(j));
        }
        let center = match rule {
            CenterRule::Mean => {
                let mut c = vec![0.0; p];
                for r in flat.chunks_exact(p) {
                    for k in 0..p {
                        c[k] += r[k];
                    }
                }
                c.iter_mut().for_each(|v| *v /= idx.len() as f64);
                return Ok(Some((c, None)));
            }
            CenterRule::Cq(cfg) => {
                let key = (fingerprint(idx), idx.len());
                let agd = match &cached[i] {
                    Some((h, m, c)) if (*h, *m) == key => c.clone(),
                    _ => cq_center_flat(flat.clone(), p, &cfg)?.0,
                };
                let entry = Some((key.0, key.1, agd.clone()));
                let old = design.row(i);
                let pw = SqPow::new(cfg.q);
                let obj = |z: &[f64]| -> f64 { flat.chunks_exact(p).map(|r| pw.of(dist2(z, r))).sum() };
                let c = if obj(old) < obj(&agd) { old.to_vec() } else { agd };
                (c, entry)
            }
        };
        Ok(Some(center))
    });

    let mut next = design.clone();
    let mut empty = Vec::new();
    let mut new_slots = Vec::with_capacity(n);
    for (i, r) in results.into_iter().enumerate() {
        match r? {
            Some((c, entry)) => {
                next.row_mut(i).copy_from_slice(&c);
                clip_in_place(cands.region(), next.row_mut(i), pts);
                new_slots.push(entry);
            }
            None => {
                empty.push(i);
                new_slots.push(None);
            }
        }
    }
    if let Some(c) = cache {
        c.slots = new_slots;
    }
    if !empty.is_empty() {
        debug!("re-seeding {} empty cluster(s)", empty.len());
        let placed: Vec<usize> = (0..n).filter(|i| !empty.contains(i)).collect();
        let placed_pts = next.select(&placed);
        let mut far: Vec<f64> = if placed_pts.is_empty() {
            vec![f64::INFINITY; pts.len()]
        } else {
            par::map_range(pts.len(), |j| nearest(pts.row(j), &placed_pts).1)
        };
        for &i in &empty {
            let (_, j) = par::argmax(far.len(), |j| far[j]).expect("non-empty candidates");
            let y = pts.row(j).to_vec();
            next.row_mut(i).copy_from_slice(&y);
            for (k, f) in far.iter_mut().enumerate() {
                *f = f.min(dist2(pts.row(k), &y));
            }
        }
    }
    let moved = (0..n).map(|i| dist2(design.row(i), next.row(i))).fold(0.0, f64::max).sqrt();
    Ok((next, moved))
}

/// Output of [`mmc_step`].
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub design: Design,
    /// Fresh assignment of the candidates to the new design.
    pub assignment: Assignment,
    /// `h_q` of the new design.
    pub hq: f64,
    /// Largest displacement of a design point during the step.
    pub moved: f64,
}

/// One assignment pass followed by one center update.
pub fn mmc_step(candidates: &CandidateSet, design: &Design, cfg: &AgdConfig) -> Result<StepOutcome> {
    cfg.validate()?;
    check_design(candidates, design)?;
    let assignment = assign_points(candidates.points(), design.points());
    step_from(candidates, design, &assignment, CenterRule::Cq(*cfg), cfg.q, None)
}

fn step_from(
    candidates: &CandidateSet,
    design: &Design,
    assignment: &Assignment,
    rule: CenterRule,
    q: f64,
    cache: Option<&mut CenterCache>,
) -> Result<StepOutcome> {
    let (pts, moved) = update_centers(candidates, design.points(), assignment, rule, cache)?;
    let fresh = assign_points(candidates.points(), &pts);
    let hq = hq_from_assignment(&fresh, q);
    Ok(StepOutcome { design: Design::new(pts)?, assignment: fresh, hq, moved })
}

/// Output of [`mmc`] and of the Lloyd baseline.
#[derive(Clone, Debug)]
pub struct ClusteringRun {
    pub design: Design,
    /// Objective of the initial design followed by its value after each
    /// iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimax clustering from `init`: iterate [`mmc_step`] until no design point
/// moves by `cfg.eps_in` or `t_mmc` iterations have run.
pub fn mmc(candidates: &CandidateSet, init: &Design, cfg: &AgdConfig, t_mmc: usize) -> Result<ClusteringRun> {
    cfg.validate()?;
    cluster_loop(candidates, init, CenterRule::Cq(*cfg), cfg.q, cfg.eps_in, t_mmc)
}

pub(crate) fn cluster_loop(
    candidates: &CandidateSet,
    init: &Design,
    rule: CenterRule,
    q: f64,
    eps: f64,
    cap: usize,
) -> Result<ClusteringRun> {
    check_design(candidates, init)?;
    if cap == 0 {
        return Err(Error::InvalidConfig("iteration cap must be at least 1".into()));
    }
    let mut design = init.clone();
    let mut assignment = assign_points(candidates.points(), design.points());
    let mut trace = vec![hq_from_assignment(&assignment, q)];
    let mut cache = CenterCache::default();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cap {
        let step = step_from(candidates, &design, &assignment, rule, q, Some(&mut cache))?;
        iterations += 1;
        trace.push(step.hq);
        design = step.design;
        assignment = step.assignment;
        if step.moved < eps {
            converged = true;
            break;
        }
    }
    debug!("clustering stopped after {iterations} iteration(s), converged = {converged}");
    Ok(ClusteringRun { design, trace, iterations, converged })
}
