//! `C_q` centers: minimizers of the power mean `D_q(z; Z) = 1/(m q) sum ||z - z_i||^q`.
//!
//! For `q = 2` the center is the arithmetic mean; as `q` grows it approaches
//! the point minimizing the largest distance to `Z`. For `q >= 4`, `D_q` is
//! `beta`-smooth and `mu`-strongly convex on the convex hull of `Z`, so a
//! fixed-step accelerated gradient method converges at the optimal rate.
//!
//! All iterations run on a normalized copy of the cluster (centered at its
//! mean and scaled by its largest distance from the mean): `||.||^q` with
//! `q = 10` overflows quickly on raw coordinates, and the minimizer is
//! equivariant under translation and scaling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{dist2, PointSet};

/// Clusters up to this size get the exact smoothness constant; larger ones
/// use an `O(m)` upper bound of it as the step size.
pub const EXACT_BETA_MAX: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgdConfig {
    /// Exponent of the power mean, at least 4.
    pub q: f64,
    /// Stop once the estimated distance to the center, `||grad|| / mu_loc`,
    /// is below `eps_in` times the cluster radius.
    pub eps_in: f64,
    pub max_iter: usize,
}

impl Default for AgdConfig {
    fn default() -> Self {
        Self { q: 10.0, eps_in: 1e-4, max_iter: 1000 }
    }
}

impl AgdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q >= 4.0) || !self.q.is_finite() {
            return Err(Error::InvalidConfig(format!("q must be at least 4, got {}", self.q)));
        }
        if !(self.eps_in > 0.0) {
            return Err(Error::InvalidConfig(format!("eps_in must be positive, got {}", self.eps_in)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// `d2 -> d2^(e/2)` with the exponent classified once, so hot loops avoid
/// generic `powf` for the usual even exponents.
#[derive(Clone, Copy, Debug)]
pub(crate) enum SqPow {
    Zero,
    One,
    Two,
    Three,
    Four,
    Five,
    Int(i32),
    Real(f64),
}

impl SqPow {
    pub(crate) fn new(e: f64) -> Self {
        let half = 0.5 * e;
        if half.fract() == 0.0 && half.abs() < 64.0 {
            match half as i32 {
                0 => SqPow::Zero,
                1 => SqPow::One,
                2 => SqPow::Two,
                3 => SqPow::Three,
                4 => SqPow::Four,
                5 => SqPow::Five,
                k => SqPow::Int(k),
            }
        } else {
            SqPow::Real(half)
        }
    }

    #[inline(always)]
    pub(crate) fn of(self, d2: f64) -> f64 {
        match self {
            SqPow::Zero => 1.0,
            SqPow::One => d2,
            SqPow::Two => d2 * d2,
            SqPow::Three => d2 * d2 * d2,
            SqPow::Four => {
                let s = d2 * d2;
                s * s
            }
            SqPow::Five => {
                let s = d2 * d2;
                s * s * d2
            }
            SqPow::Int(k) => d2.powi(k),
            SqPow::Real(h) => {
                if d2 == 0.0 {
                    if h > 0.0 {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    d2.powf(h)
                }
            }
        }
    }
}

fn check_dims(z: &[f64], cluster: &PointSet) -> Result<()> {
    if cluster.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if z.len() != cluster.dim() {
        return Err(Error::DimensionMismatch { expected: cluster.dim(), got: z.len() });
    }
    Ok(())
}

/// `D_q(z; Z)`.
pub fn dq_objective(z: &[f64], cluster: &PointSet, q: f64) -> Result<f64> {
    check_dims(z, cluster)?;
    if !(q > 0.0) {
        return Err(Error::UnsupportedExponent(q));
    }
    Ok(raw_objective(z, cluster.as_slice(), q))
}

/// `sum_i ||z - z_i||^q / (m q)` over a flat row-major buffer.
fn raw_objective(z: &[f64], flat: &[f64], q: f64) -> f64 {
    let p = z.len();
    let m = flat.len() / p;
    let pw = SqPow::new(q);
    let s: f64 = flat.chunks_exact(p).map(|r| pw.of(dist2(z, r))).sum();
    s / (m as f64 * q)
}

/// Gradient of `D_q`: `1/m sum ||z - z_i||^(q-2) (z - z_i)`.
pub fn dq_gradient(z: &[f64], cluster: &PointSet, q: f64) -> Result<Vec<f64>> {
    check_dims(z, cluster)?;
    if !(q >= 2.0) {
        return Err(Error::UnsupportedExponent(q));
    }
    let mut g = vec![0.0; z.len()];
    raw_gradient(z, cluster.as_slice(), q, &mut g);
    Ok(g)
}

/// Writes the gradient into `g` and returns `1/m sum_i ||z - z_i||^(q-2)`,
/// the smallest Hessian eigenvalue bound at `z`.
fn raw_gradient(z: &[f64], flat: &[f64], q: f64, g: &mut [f64]) -> f64 {
    let p = z.len();
    let m = flat.len() / p;
    let pw = SqPow::new(q - 2.0);
    let mut curvature = 0.0;
    if p == 2 {
        let (z0, z1) = (z[0], z[1]);
        let (mut g0, mut g1) = (0.0, 0.0);
        for r in flat.chunks_exact(2) {
            let (a, b) = (z0 - r[0], z1 - r[1]);
            let w = pw.of(a * a + b * b);
            curvature += w;
            g0 += w * a;
            g1 += w * b;
        }
        g[0] = g0;
        g[1] = g1;
    } else {
        g.iter_mut().for_each(|v| *v = 0.0);
        for r in flat.chunks_exact(p) {
            let w = pw.of(dist2(z, r));
            curvature += w;
            for ((gk, zk), rk) in g.iter_mut().zip(z).zip(r) {
                *gk += w * (zk - rk);
            }
        }
    }
    let inv = 1.0 / m as f64;
    g.iter_mut().for_each(|v| *v *= inv);
    curvature * inv
}

/// Result of [`smoothness_constants`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Smoothness {
    /// One distinct point: the center is that point and no iteration is
    /// needed.
    Degenerate,
    /// Curvature bounds of `D_q` on the convex hull.
    Bounds { beta_bar: f64, mu_bar: f64 },
}

/// Smoothness and strong-convexity constants of `D_q` on `conv(Z)`:
///
/// * `beta_bar = (q - 1) max_j 1/m sum_i ||z_j - z_i||^(q-2)`
/// * `mu_bar = 1/m sum_i ||C_{q-2}(Z) - z_i||^(q-2)`
///
/// `C_{q-2}` is the mean when `q = 4` and is otherwise solved to tight
/// tolerance so that `mu_bar` stays a valid lower bound.
pub fn smoothness_constants(cluster: &PointSet, q: f64) -> Result<Smoothness> {
    if cluster.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if !(q >= 4.0) {
        return Err(Error::UnsupportedExponent(q));
    }
    let Some(norm) = Normalized::new(cluster) else {
        return Ok(Smoothness::Degenerate);
    };
    let rescale = norm.scale.powf(q - 2.0);
    let beta_bar = (q - 1.0) * max_vertex_power_mean(&norm.flat, norm.dim, q - 2.0) * rescale;
    let lower = solve_center(&norm, q - 2.0, 1e-12, 100_000)?;
    let mu_bar = (q - 2.0) * raw_objective(&lower, &norm.flat, q - 2.0) * rescale;
    if !beta_bar.is_finite() || !mu_bar.is_finite() {
        return Err(Error::NonFinite("smoothness constants"));
    }
    Ok(Smoothness::Bounds { beta_bar, mu_bar })
}

/// `max_j 1/m sum_i ||z_j - z_i||^e`.
fn max_vertex_power_mean(flat: &[f64], p: usize, e: f64) -> f64 {
    let m = flat.len() / p;
    let pw = SqPow::new(e);
    let mut best: f64 = 0.0;
    for a in flat.chunks_exact(p) {
        let s: f64 = flat.chunks_exact(p).map(|b| pw.of(dist2(a, b))).sum();
        best = best.max(s);
    }
    best / m as f64
}

/// Step-size constant used by the solver on a normalized cluster: the exact
/// `beta_bar` for small clusters, otherwise the bound obtained from
/// `||z_j - z_i|| <= r_j + r_i <= 1 + r_i`.
fn step_constant(norm: &Normalized, q: f64) -> f64 {
    let p = norm.dim;
    let m = norm.flat.len() / p;
    if m <= EXACT_BETA_MAX {
        return (q - 1.0) * max_vertex_power_mean(&norm.flat, p, q - 2.0);
    }
    let s: f64 = norm
        .flat
        .chunks_exact(p)
        .map(|r| {
            let ri = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            (1.0 + ri).powf(q - 2.0)
        })
        .sum();
    (q - 1.0) * s / m as f64
}

/// A cluster translated to its mean and scaled to unit radius.
struct Normalized {
    flat: Vec<f64>,
    dim: usize,
    center: Vec<f64>,
    scale: f64,
}

impl Normalized {
    fn new(cluster: &PointSet) -> Option<Self> {
        Self::from_flat(cluster.as_slice().to_vec(), cluster.dim())
    }

    fn from_flat(mut flat: Vec<f64>, dim: usize) -> Option<Self> {
        let m = flat.len() / dim;
        let mut center = vec![0.0; dim];
        for r in flat.chunks_exact(dim) {
            for k in 0..dim {
                center[k] += r[k];
            }
        }
        center.iter_mut().for_each(|c| *c /= m as f64);
        let scale = flat
            .chunks_exact(dim)
            .map(|r| dist2(r, &center))
            .fold(0.0, f64::max)
            .sqrt();
        if !(scale > 0.0) || m < 2 {
            return None;
        }
        let inv = 1.0 / scale;
        for r in flat.chunks_exact_mut(dim) {
            for k in 0..dim {
                r[k] = (r[k] - center[k]) * inv;
            }
        }
        Some(Self { flat, dim, center, scale })
    }

    fn to_original(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.center).map(|(v, c)| c + v * self.scale).collect()
    }
}

/// Minimizer of `D_e` on a normalized cluster, in normalized coordinates.
fn solve_center(norm: &Normalized, e: f64, eps: f64, max_iter: usize) -> Result<Vec<f64>> {
    let p = norm.dim;
    if e == 2.0 {
        return Ok(vec![0.0; p]);
    }
    let beta = step_constant(norm, e.max(3.0));
    let (u, _) = accelerated_descent(&norm.flat, p, e, beta, eps, max_iter)?;
    Ok(u)
}

/// Nesterov's method with `lambda_0 = 0`,
/// `lambda_t = (1 + sqrt(1 + 4 lambda_{t-1}^2)) / 2`,
/// `gamma_t = (1 - lambda_t) / lambda_{t+1}` and fixed step `1 / beta`,
/// started from the origin (the normalized mean).
///
/// Stops once the estimated distance to the optimum, `||grad|| / mu(z)`
/// with `mu(z)` the local curvature bound, drops below `eps`. The momentum
/// iterate can stall at the turn of an oscillation far from the optimum, so
/// its displacement is not used. Momentum is reset whenever the gradient points
/// against the last step.
///
/// Returns the last solution iterate and the number of iterations.
fn accelerated_descent(
    flat: &[f64],
    p: usize,
    q: f64,
    beta: f64,
    eps: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let mut z = vec![0.0; p];
    let mut u = vec![0.0; p];
    let mut u_next = vec![0.0; p];
    let mut g = vec![0.0; p];
    let mut lambda: f64 = 1.0;
    let eps2 = eps * eps;
    let mut iters = 0;
    while iters < max_iter {
        iters += 1;
        let mu = raw_gradient(&z, flat, q, &mut g);
        let mut step = 0.0;
        let mut against = 0.0;
        for k in 0..p {
            u_next[k] = z[k] - g[k] / beta;
            step += (g[k] / beta).powi(2);
            against += g[k] * (u_next[k] - u[k]);
        }
        if !step.is_finite() {
            return Err(Error::NonFinite("C_q center iteration"));
        }
        std::mem::swap(&mut u, &mut u_next);
        if step * (beta / mu).powi(2) < eps2 || step == 0.0 {
            break;
        }
        if against > 0.0 {
            lambda = 1.0;
            z.copy_from_slice(&u);
            continue;
        }
        let lambda_next = 0.5 * (1.0 + (1.0 + 4.0 * lambda * lambda).sqrt());
        let gamma = (1.0 - lambda) / lambda_next;
        for k in 0..p {
            z[k] = (1.0 - gamma) * u[k] + gamma * u_next[k];
        }
        lambda = lambda_next;
    }
    Ok((u, iters))
}

/// `C_q(Z)` by accelerated gradient descent from the arithmetic mean.
pub fn cq_center(cluster: &PointSet, cfg: &AgdConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if cluster.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    Ok(cq_center_flat(cluster.as_slice().to_vec(), cluster.dim(), cfg)?.0)
}

/// [`cq_center`] on an owned row-major buffer, also returning the iteration
/// count (0 for degenerate clusters).
pub(crate) fn cq_center_flat(flat: Vec<f64>, dim: usize, cfg: &AgdConfig) -> Result<(Vec<f64>, usize)> {
    let first = flat[..dim].to_vec();
    let Some(norm) = Normalized::from_flat(flat, dim) else {
        return Ok((first, 0));
    };
    let beta = step_constant(&norm, cfg.q);
    let (u, iters) = accelerated_descent(&norm.flat, dim, cfg.q, beta, cfg.eps_in, cfg.max_iter)?;
    log::trace!("C_q center of {} points: {iters} iterations", norm.flat.len() / dim);
    // not monotone per step; never end worse than the starting mean
    let start = raw_objective(&vec![0.0; dim], &norm.flat, cfg.q);
    let end = raw_objective(&u, &norm.flat, cfg.q);
    if !end.is_finite() {
        return Err(Error::NonFinite("C_q objective"));
    }
    let best = if end <= start { u } else { vec![0.0; dim] };
    Ok((norm.to_original(&best), iters))
}

/// Conditioning ratio `max_j D_q(z_j; Z) / D_q(C_q(Z); Z)`; 1 when all
/// points coincide.
pub fn kappa_diagnostic(cluster: &PointSet, q: f64) -> Result<f64> {
    if cluster.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if !(q >= 2.0) {
        return Err(Error::UnsupportedExponent(q));
    }
    let Some(norm) = Normalized::new(cluster) else {
        return Ok(1.0);
    };
    let center = solve_center(&norm, q, 1e-12, 100_000)?;
    let low = raw_objective(&center, &norm.flat, q);
    let high = max_vertex_power_mean(&norm.flat, norm.dim, q) / q;
    Ok((high / low).max(1.0))
}
