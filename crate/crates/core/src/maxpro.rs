//! MaxPro refinement of a minimax design.
//!
//! Point `i` owns the candidates nearest to it and covers them within `d_i`;
//! the design as a whole covers everything within `d* = max_i d_i`. Moving
//! point `i` by at most `d* - d_i` therefore cannot push any candidate
//! farther than `d*` from the design. Inside that slack ball each point is
//! moved, one at a time, to lower the MaxPro criterion
//! `sum_{i<j} 1 / prod_k (m_ik - m_jk)^2`, which rewards designs whose
//! coordinate projections do not collide.

use log::{debug, info};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lds::{CandidateSet, RngSeed};
use crate::mmc::{assign_points, check_design, Design};
use crate::points::{dist, dist2, PointSet};
use crate::region::{clip_in_place, Region};

/// Coordinate differences below this are treated as collisions.
const COLLISION: f64 = 1e-12;
/// Size of the nudge applied to a colliding coordinate, relative to the
/// region diameter.
const NUDGE: f64 = 1e-10;

/// Per-point covering radii of a design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackProfile {
    /// Largest distance from point `i` to a candidate it owns; 0 when it owns
    /// none.
    pub d: Vec<f64>,
    /// `max_i d[i]`.
    pub d_star: f64,
    /// Index of the candidate attaining `d[i]` (lowest index on ties).
    pub witness: Vec<Option<usize>>,
}

impl SlackProfile {
    /// Radius `d* - d_i` of the ball point `i` may move in.
    pub fn slack(&self, i: usize) -> f64 {
        self.d_star - self.d[i]
    }
}

pub fn per_point_minimax(design: &Design, candidates: &CandidateSet) -> Result<SlackProfile> {
    check_design(candidates, design)?;
    Ok(slack_points(candidates.points(), design.points()))
}

fn slack_points(cands: &PointSet, design: &PointSet) -> SlackProfile {
    let a = assign_points(cands, design);
    let mut d2 = vec![0.0f64; design.len()];
    let mut witness = vec![None; design.len()];
    for (j, (&i, &e)) in a.owner.iter().zip(&a.dist2).enumerate() {
        if witness[i].is_none() || e > d2[i] {
            d2[i] = e;
            witness[i] = Some(j);
        }
    }
    let d: Vec<f64> = d2.iter().map(|v| v.sqrt()).collect();
    let d_star = d.iter().cloned().fold(0.0, f64::max);
    SlackProfile { d, d_star, witness }
}

/// `log sum_{i<j} 1 / prod_k (m_ik - m_jk)^2`; `+inf` when two points share
/// a coordinate.
pub fn log_maxpro_criterion(points: &PointSet) -> f64 {
    let n = points.len();
    let mut terms = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            terms.push(pair_log_term(points.row(i), points.row(j)));
        }
    }
    log_sum_exp(&terms)
}

/// The MaxPro criterion; `+inf` signals a coordinate collision.
pub fn maxpro_criterion(design: &Design) -> f64 {
    log_maxpro_criterion(design.points()).exp()
}

fn pair_log_term(a: &[f64], b: &[f64]) -> f64 {
    -2.0 * a.iter().zip(b).map(|(x, y)| (x - y).abs().ln()).sum::<f64>()
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// Log-form block objective for a free point `x` against fixed `others`,
/// and its gradient.
fn block_objective(x: &[f64], others: &[&[f64]], grad: Option<&mut [f64]>) -> f64 {
    let terms: Vec<f64> = others.iter().map(|m| pair_log_term(x, m)).collect();
    let f = log_sum_exp(&terms);
    if let Some(g) = grad {
        g.iter_mut().for_each(|v| *v = 0.0);
        if f.is_finite() {
            for (m, t) in others.iter().zip(&terms) {
                let w = (t - f).exp();
                for k in 0..x.len() {
                    g[k] -= 2.0 * w / (x[k] - m[k]);
                }
            }
        }
    }
    f
}

/// Settings for [`minimaxpro`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxProConfig {
    pub max_sweeps: usize,
    /// A sweep in which no point moves this far ends the refinement.
    pub eps: f64,
    /// Random starts inside the slack ball, besides the incumbent.
    pub restarts: usize,
    /// Gradient iterations per start.
    pub max_iter: usize,
    pub seed: RngSeed,
}

impl Default for MaxProConfig {
    fn default() -> Self {
        Self { max_sweeps: 10, eps: 1e-4, restarts: 5, max_iter: 100, seed: RngSeed(0) }
    }
}

fn project_ball(x: &mut [f64], center: &[f64], radius: f64) {
    let r = dist(x, center);
    if r > radius {
        let t = if r > 0.0 { radius / r } else { 0.0 };
        for (v, c) in x.iter_mut().zip(center) {
            *v = c + t * (*v - c);
        }
    }
}

/// Nearest point of `ball(center, radius) ∩ region` by Dykstra's alternating
/// projections, finished with a pull toward `center` (which must be
/// feasible) so the result satisfies both constraints exactly.
fn project(x: &mut [f64], center: &[f64], radius: f64, region: &Region) {
    let p = x.len();
    let (mut pa, mut pb) = (vec![0.0; p], vec![0.0; p]);
    let mut y = vec![0.0; p];
    for _ in 0..50 {
        for k in 0..p {
            y[k] = x[k] + pa[k];
        }
        let before = y.clone();
        project_ball(&mut y, center, radius);
        for k in 0..p {
            pa[k] = before[k] - y[k];
            x[k] = y[k] + pb[k];
        }
        let before = x.to_vec();
        region.project_unchecked(x);
        let mut change = 0.0;
        for k in 0..p {
            pb[k] = before[k] - x[k];
            change += (x[k] - y[k]).powi(2);
        }
        if change < 1e-30 {
            break;
        }
    }
    project_ball(x, center, radius * (1.0 - 1e-15));
    if region.contains_unchecked(x) {
        return;
    }
    let dir: Vec<f64> = x.iter().zip(center).map(|(v, c)| v - c).collect();
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let y: Vec<f64> = center.iter().zip(&dir).map(|(c, d)| c + mid * d).collect();
        if region.contains_unchecked(&y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for ((v, c), d) in x.iter_mut().zip(center).zip(&dir) {
        *v = c + lo * d;
    }
}

/// Moves coordinates that coincide with a neighbor's by a tiny amount.
fn nudge(x: &mut [f64], others: &[&[f64]], step: f64) {
    for m in others {
        for k in 0..x.len() {
            if (x[k] - m[k]).abs() < COLLISION {
                x[k] = m[k] + if x[k] >= m[k] { step } else { -step };
            }
        }
    }
}

/// Best point found for design row `i` inside its slack ball.
///
/// Projected gradient descent with backtracking on the log-form objective,
/// from the incumbent and from `cfg.restarts` random points of the ball. The
/// incumbent is returned unless a strictly better feasible point is found.
pub fn block_refine(
    design: &PointSet,
    i: usize,
    slack: &SlackProfile,
    region: &Region,
    cfg: &MaxProConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let radius = slack.slack(i);
    if radius < 0.0 || !radius.is_finite() {
        return Err(Error::StaleSlack(radius));
    }
    let center = design.row(i).to_vec();
    if radius == 0.0 || design.len() < 2 {
        return Ok(center);
    }
    let p = design.dim();
    let scale = region.diameter();
    let others: Vec<&[f64]> = (0..design.len()).filter(|&j| j != i).map(|j| design.row(j)).collect();
    let feasible = |x: &mut Vec<f64>| {
        nudge(x, &others, NUDGE * scale);
        project(x, &center, radius, region);
    };

    let incumbent = block_objective(&center, &others, None);
    let mut best = (incumbent, center.clone());
    let mut starts = vec![center.clone()];
    for _ in 0..cfg.restarts {
        let mut dir: Vec<f64> = (0..p).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let r = radius * rng.gen::<f64>().powf(1.0 / p as f64);
        dir.iter_mut().zip(&center).for_each(|(v, c)| *v = c + *v / norm * r);
        starts.push(dir);
    }

    let mut g = vec![0.0; p];
    for mut x in starts {
        feasible(&mut x);
        let mut f = block_objective(&x, &others, Some(&mut g));
        let mut alpha = 0.1 * radius;
        for _ in 0..cfg.max_iter {
            if !f.is_finite() {
                break;
            }
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn == 0.0 {
                break;
            }
            let mut accepted = false;
            while alpha > 1e-14 * radius {
                let mut y: Vec<f64> = x.iter().zip(&g).map(|(v, d)| v - alpha * d / gn).collect();
                feasible(&mut y);
                let fy = block_objective(&y, &others, None);
                if fy < f {
                    let step = dist(&x, &y);
                    x = y;
                    f = block_objective(&x, &others, Some(&mut g));
                    alpha = (alpha * 2.0).min(radius);
                    accepted = step > 1e-14 * scale;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if f < best.0 {
            best = (f, x);
        }
    }
    Ok(best.1)
}

/// Output of [`minimaxpro`].
#[derive(Clone, Debug)]
pub struct MaxProRun {
    pub design: Design,
    /// Minimax distance over the candidates before and after refinement.
    pub pre_minimax: f64,
    pub post_minimax: f64,
    /// Tolerance `N^{-1/p} * diam(region)` on the minimax increase.
    pub eps_prop: f64,
    pub sweeps: usize,
    /// Log MaxPro criterion before refinement and after each sweep.
    pub log_criterion: Vec<f64>,
}

/// `N^{-1/p} * diam(region)`: the resolution of a minimax distance measured
/// on `N` candidates.
pub fn eps_prop(candidates: &CandidateSet) -> f64 {
    (candidates.len() as f64).powf(-1.0 / candidates.dim() as f64) * candidates.region().diameter()
}

/// Sweeps the design in index order, recomputing the slack profile before
/// every block update, until a sweep moves no point by `cfg.eps` or
/// `cfg.max_sweeps` sweeps have run.
pub fn minimaxpro(design: &Design, candidates: &CandidateSet, cfg: &MaxProConfig) -> Result<MaxProRun> {
    check_design(candidates, design)?;
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let region = candidates.region();
    let cands = candidates.points();
    let mut pts = design.points().clone();
    for row in pts.rows_mut() {
        clip_in_place(region, row, cands);
    }
    let pre = slack_points(cands, design.points()).d_star;
    let mut log_criterion = vec![log_maxpro_criterion(&pts)];
    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let mut moved = 0.0f64;
        for i in 0..pts.len() {
            let slack = slack_points(cands, &pts);
            let mut rng = cfg.seed.derive(((sweeps as u64) << 32) | i as u64).rng();
            let next = block_refine(&pts, i, &slack, region, cfg, &mut rng)?;
            moved = moved.max(dist2(pts.row(i), &next).sqrt());
            pts.row_mut(i).copy_from_slice(&next);
        }
        log_criterion.push(log_maxpro_criterion(&pts));
        debug!("miniMaxPro sweep {sweeps}: largest move {moved:.3e}, log criterion {:.6}", log_criterion[sweeps]);
        if moved < cfg.eps {
            break;
        }
    }
    let post = slack_points(cands, &pts).d_star;
    info!("miniMaxPro: minimax {pre:.6} -> {post:.6} after {sweeps} sweep(s)");
    Ok(MaxProRun {
        design: Design::new(pts)?,
        pre_minimax: pre,
        post_minimax: post,
        eps_prop: eps_prop(candidates),
        sweeps,
        log_criterion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lds::candidate_set;
    use crate::metrics::minimax_criterion;

    fn rows(r: &[&[f64]]) -> PointSet {
        PointSet::from_rows(r).unwrap()
    }

    fn grid(m: usize) -> CandidateSet {
        let mut r = Vec::new();
        for a in 0..=m {
            for b in 0..=m {
                r.push([a as f64 / m as f64, b as f64 / m as f64]);
            }
        }
        CandidateSet::from_points(&Region::Hypercube(2), PointSet::from_rows(&r).unwrap()).unwrap()
    }

    #[test]
    fn criterion_examples() {
        let a = Design::new(rows(&[&[0.0, 0.0], &[1.0, 1.0]])).unwrap();
        assert!((maxpro_criterion(&a) - 1.0).abs() < 1e-15);
        let b = Design::new(rows(&[&[0.0, 0.0], &[0.5, 1.0]])).unwrap();
        assert!((maxpro_criterion(&b) - 4.0).abs() < 1e-14);
        let c = Design::new(rows(&[&[0.0, 0.3], &[0.5, 0.3]])).unwrap();
        assert_eq!(maxpro_criterion(&c), f64::INFINITY);
    }

    #[test]
    fn criterion_matches_double_loop() {
        let mut rng = RngSeed(4).rng();
        let pts = PointSet::new(3, (0..30).map(|_| rng.gen()).collect()).unwrap();
        let mut naive = 0.0;
        for i in 0..10 {
            for j in i + 1..10 {
                let prod: f64 = (0..3).map(|k| (pts.row(i)[k] - pts.row(j)[k]).powi(2)).product();
                naive += 1.0 / prod;
            }
        }
        let got = maxpro_criterion(&Design::new(pts).unwrap());
        assert!((got - naive).abs() <= 1e-10 * naive);
    }

    #[test]
    fn block_gradient_matches_differences() {
        let mut rng = RngSeed(8).rng();
        let fixed: Vec<Vec<f64>> = (0..5).map(|_| (0..3).map(|_| rng.gen()).collect()).collect();
        let others: Vec<&[f64]> = fixed.iter().map(|v| v.as_slice()).collect();
        let x = vec![0.31, 0.77, 0.52];
        let mut g = vec![0.0; 3];
        block_objective(&x, &others, Some(&mut g));
        for k in 0..3 {
            let h = 1e-6;
            let (mut a, mut b) = (x.clone(), x.clone());
            a[k] += h;
            b[k] -= h;
            let fd = (block_objective(&a, &others, None) - block_objective(&b, &others, None)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-5 * g[k].abs().max(1.0), "{k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn slack_examples() {
        let c = grid(40);
        let d = Design::new(c.points().clone()).unwrap();
        let s = per_point_minimax(&d, &c).unwrap();
        assert!(s.d.iter().all(|&v| v == 0.0));

        let one = Design::new(rows(&[&[0.3, 0.6]])).unwrap();
        let s = per_point_minimax(&one, &c).unwrap();
        assert_eq!(s.d[0], minimax_criterion(&one, &c).unwrap().0);

        let quad = Design::new(rows(&[&[0.25, 0.25], &[0.75, 0.25], &[0.25, 0.75], &[0.75, 0.75]])).unwrap();
        let s = per_point_minimax(&quad, &c).unwrap();
        for &v in &s.d {
            assert!((v - 2f64.sqrt() / 4.0).abs() < 1e-12);
        }
        assert_eq!(s.d_star, minimax_criterion(&quad, &c).unwrap().0);
        let a = assign_points(c.points(), quad.points());
        for (i, w) in s.witness.iter().enumerate() {
            assert_eq!(a.owner[w.unwrap()], i);
        }
    }

    #[test]
    fn bottleneck_point_is_immobile() {
        let c = grid(30);
        let d = rows(&[&[0.2, 0.2], &[0.8, 0.7], &[0.4, 0.9]]);
        let s = slack_points(c.points(), &d);
        let i = (0..3).find(|&i| s.d[i] == s.d_star).unwrap();
        let mut rng = RngSeed(0).rng();
        let m = block_refine(&d, i, &s, c.region(), &MaxProConfig::default(), &mut rng).unwrap();
        assert_eq!(m, d.row(i));
    }

    #[test]
    fn stale_slack_is_rejected() {
        let d = rows(&[&[0.2, 0.2], &[0.8, 0.7]]);
        let s = SlackProfile { d: vec![0.5, 0.1], d_star: 0.4, witness: vec![None, None] };
        let mut rng = RngSeed(0).rng();
        let r = block_refine(&d, 0, &s, &Region::Hypercube(2), &MaxProConfig::default(), &mut rng);
        assert!(matches!(r, Err(Error::StaleSlack(_))));
    }

    #[test]
    fn refined_point_beats_random_search_baseline() {
        let region = Region::Hypercube(2);
        let mut rng = RngSeed(11).rng();
        for _ in 0..20 {
            let d = PointSet::new(2, (0..4).map(|_| rng.gen()).collect()).unwrap();
            let s = SlackProfile { d: vec![0.0, 0.3], d_star: 0.3, witness: vec![None, None] };
            let m = block_refine(&d, 0, &s, &region, &MaxProConfig::default(), &mut rng).unwrap();
            assert!(dist(&m, d.row(0)) <= 0.3 + 1e-12);
            assert!(region.contains(&m).unwrap());
            let others = [d.row(1)];
            let f = block_objective(&m, &others, None);
            assert!(f < block_objective(d.row(0), &others, None));
            // The optimizer should be at least as good as a dense random search.
            let mut best = f64::INFINITY;
            for _ in 0..2000 {
                let mut x: Vec<f64> = d.row(0).iter().map(|v| v + 0.6 * (rng.gen::<f64>() - 0.5)).collect();
                project(&mut x, d.row(0), 0.3, &region);
                best = best.min(block_objective(&x, &others, None));
            }
            assert!(f <= best + 1e-9, "{f} vs {best}");
        }
    }

    #[test]
    fn refinement_keeps_minimax_and_lowers_criterion() {
        let c = candidate_set(&Region::Hypercube(2), 2000, RngSeed(0)).unwrap();
        let d = Design::new(rows(&[&[0.25, 0.25], &[0.75, 0.25], &[0.25, 0.75], &[0.75, 0.75], &[0.5, 0.5]])).unwrap();
        let run = minimaxpro(&d, &c, &MaxProConfig::default()).unwrap();
        assert!(run.post_minimax <= run.pre_minimax + 1e-12);
        assert!(run.log_criterion.windows(2).all(|w| w[1] <= w[0]));
        assert!(run.log_criterion.last().unwrap().is_finite());
        assert!(run.design.points().rows().all(|r| c.region().contains(r).unwrap()));
        let again = minimaxpro(&d, &c, &MaxProConfig::default()).unwrap();
        assert_eq!(again.design, run.design);
    }

    #[test]
    fn zero_slack_design_is_a_fixed_point() {
        let c = grid(2);
        let d = Design::new(c.points().clone()).unwrap();
        let run = minimaxpro(&d, &c, &MaxProConfig::default()).unwrap();
        assert_eq!(run.design, d);
        assert_eq!(run.sweeps, 1);
    }
}
