//! Design spaces.
//!
//! Four kinds of bounded region are supported: the unit hypercube `[0,1]^p`,
//! the ordered simplex `{0 <= x_1 <= ... <= x_p <= 1}`, the unit ball and
//! simple polygons in the plane. The first three carry a closed-form inverse
//! Rosenblatt transform that maps uniform points of the unit cube to uniform
//! points of the region; polygons are sampled by rejection instead.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::points::{dist2, PointSet};

/// Slack used by the containment tests so boundary points stay inside after
/// rounding.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Hypercube(usize),
    Simplex(usize),
    Ball(usize),
    Polygon(Polygon),
}

impl Region {
    pub fn hypercube(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Region::Hypercube(dim))
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Region::Simplex(dim))
    }

    pub fn ball(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Region::Ball(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Hypercube(p) | Region::Simplex(p) | Region::Ball(p) => *p,
            Region::Polygon(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Region::Hypercube(_) => "hypercube",
            Region::Simplex(_) => "simplex",
            Region::Ball(_) => "ball",
            Region::Polygon(_) => "polygon",
        }
    }

    /// Membership in the closed region.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check(x)?;
        Ok(self.contains_unchecked(x))
    }

    pub(crate) fn contains_unchecked(&self, x: &[f64]) -> bool {
        match self {
            Region::Hypercube(_) => x.iter().all(|&v| (-BOUNDARY_TOL..=1.0 + BOUNDARY_TOL).contains(&v)),
            Region::Simplex(_) => {
                x[0] >= -BOUNDARY_TOL
                    && x.windows(2).all(|w| w[0] <= w[1] + BOUNDARY_TOL)
                    && x[x.len() - 1] <= 1.0 + BOUNDARY_TOL
            }
            Region::Ball(_) => x.iter().map(|v| v * v).sum::<f64>() <= 1.0 + BOUNDARY_TOL,
            Region::Polygon(poly) => poly.contains([x[0], x[1]]),
        }
    }

    /// Replaces `x` by the nearest point of the region.
    pub fn project(&self, x: &mut [f64]) -> Result<()> {
        self.check(x)?;
        self.project_unchecked(x);
        Ok(())
    }

    pub(crate) fn project_unchecked(&self, x: &mut [f64]) {
        match self {
            Region::Hypercube(_) => x.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0)),
            Region::Simplex(_) => {
                isotonic(x);
                x.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
            }
            Region::Ball(_) => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r > 1.0 {
                    x.iter_mut().for_each(|v| *v /= r);
                }
            }
            Region::Polygon(poly) => {
                if !poly.contains([x[0], x[1]]) {
                    let y = poly.nearest_boundary_point([x[0], x[1]]);
                    x.copy_from_slice(&y);
                }
            }
        }
    }

    /// Maps a point of `[0,1]^p` to the region so that uniform input gives
    /// uniform output.
    pub fn inverse_rosenblatt(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        let mut out = vec![0.0; u.len()];
        self.inverse_rosenblatt_into(u, &mut out)?;
        Ok(out)
    }

    pub(crate) fn inverse_rosenblatt_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            Region::Hypercube(_) => out.copy_from_slice(u),
            Region::Simplex(p) => {
                // Order statistics of p uniforms: the largest has cdf t^p, and
                // given x_{i+1} the next one is the largest of i uniforms below it.
                let p = *p;
                out[p - 1] = u[p - 1].powf(1.0 / p as f64);
                for i in (0..p - 1).rev() {
                    out[i] = out[i + 1] * u[i].powf(1.0 / (i + 1) as f64);
                }
            }
            Region::Ball(p) => ball_from_cube(*p, u, out),
            Region::Polygon(_) => return Err(Error::UnsupportedTransform("polygon regions")),
        }
        Ok(())
    }

    /// Axis-aligned bounding box as `(lower, upper)` corners.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let p = self.dim();
        match self {
            Region::Hypercube(_) | Region::Simplex(_) => (vec![0.0; p], vec![1.0; p]),
            Region::Ball(_) => (vec![-1.0; p], vec![1.0; p]),
            Region::Polygon(poly) => {
                let (lo, hi) = poly.bounding_box();
                (lo.to_vec(), hi.to_vec())
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Region::Hypercube(p) | Region::Simplex(p) => (*p as f64).sqrt(),
            Region::Ball(_) => 2.0,
            Region::Polygon(poly) => poly.diameter(),
        }
    }

    /// Lebesgue measure of the region.
    pub fn volume(&self) -> f64 {
        match self {
            Region::Hypercube(_) => 1.0,
            Region::Simplex(p) => 1.0 / (1..=*p).map(|k| k as f64).product::<f64>(),
            Region::Ball(p) => {
                // V_p = pi^{p/2} / Gamma(p/2 + 1), via V_p = 2 pi / p * V_{p-2}
                let mut v = if p % 2 == 0 { 1.0 } else { 2.0 };
                let mut k = if p % 2 == 0 { 2 } else { 3 };
                while k <= *p {
                    v *= 2.0 * PI / k as f64;
                    k += 2;
                }
                v
            }
            Region::Polygon(poly) => poly.area(),
        }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Polygon(p) => write!(f, "polygon({} vertices)", p.vertices().len()),
            r => write!(f, "{}({})", r.kind(), r.dim()),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidRegion("dimension must be at least 1".into()));
    }
    Ok(())
}

/// Returns `x` when it lies in `region`, otherwise the nearest candidate
/// point (lowest index on ties).
pub fn clip_to_region(region: &Region, x: &[f64], candidates: &PointSet) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if region.contains(x)? {
        return Ok(x.to_vec());
    }
    Ok(candidates.row(nearest_row(candidates, x)).to_vec())
}

/// In-place variant of [`clip_to_region`] for callers that already checked
/// dimensions. Returns whether the point was moved.
pub(crate) fn clip_in_place(region: &Region, x: &mut [f64], candidates: &PointSet) -> bool {
    if region.contains_unchecked(x) {
        return false;
    }
    let j = nearest_row(candidates, x);
    x.copy_from_slice(candidates.row(j));
    true
}

fn nearest_row(points: &PointSet, x: &[f64]) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (j, r) in points.rows().enumerate() {
        let d = dist2(r, x);
        if d < best.0 {
            best = (d, j);
        }
    }
    best.1
}

fn ball_from_cube(p: usize, u: &[f64], out: &mut [f64]) {
    match p {
        1 => out[0] = 2.0 * u[0] - 1.0,
        _ => {
            // Hyperspherical coordinates: phi_1..phi_{p-2} in [0, pi] with
            // density sin^{p-1-k}, phi_{p-1} uniform on [0, 2 pi), radius with
            // cdf r^p.
            let r = u[p - 1].powf(1.0 / p as f64);
            let mut scale = r;
            for k in 0..p - 1 {
                let phi = if k + 1 == p - 1 {
                    2.0 * PI * u[k]
                } else {
                    inverse_sine_power_cdf(p - 2 - k, u[k])
                };
                out[k] = scale * phi.cos();
                scale *= phi.sin();
            }
            out[p - 1] = scale;
        }
    }
}

/// `int_0^phi sin^m(t) dt`.
fn sine_power_integral(m: usize, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let (mut prev2, mut prev1) = (phi, 1.0 - c);
    if m == 0 {
        return prev2;
    }
    let mut s_pow = 1.0; // sin^{k-1}
    for k in 2..=m {
        s_pow *= s;
        let next = -s_pow * c / k as f64 + (k - 1) as f64 / k as f64 * prev2;
        prev2 = prev1;
        prev1 = next;
    }
    prev1
}

/// Solves `G_m(phi) = u` on `[0, pi]` where `G_m` is the normalized
/// `sin^m` cdf; safeguarded Newton.
fn inverse_sine_power_cdf(m: usize, u: f64) -> f64 {
    match m {
        0 => return PI * u,
        1 => return (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(),
        _ => {}
    }
    let total = sine_power_integral(m, PI);
    let target = u * total;
    let (mut lo, mut hi) = (0.0, PI);
    let mut phi = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
    for _ in 0..100 {
        let f = sine_power_integral(m, phi) - target;
        if f > 0.0 {
            hi = phi;
        } else {
            lo = phi;
        }
        let dens = phi.sin().powi(m as i32);
        let mut next = phi - f / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - phi).abs() < 1e-15 || hi - lo < 1e-15 {
            return next;
        }
        phi = next;
    }
    phi
}

/// A simple polygon in the plane, vertices in traversal order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidRegion(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRegion("polygon vertices must be finite".into()));
        }
        let poly = Polygon { vertices };
        let scale = poly.diameter();
        if scale == 0.0 || poly.area() <= 1e-14 * scale * scale {
            return Err(Error::InvalidRegion("polygon vertices are collinear".into()));
        }
        for i in 0..n {
            if poly.vertices[i] == poly.vertices[(i + 1) % n] {
                return Err(Error::InvalidRegion(format!("repeated vertex at position {}", i + 1)));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a, b) = poly.edge(i);
                let (c, d) = poly.edge(j);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidRegion(format!(
                        "polygon edges {} and {} intersect",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(poly)
    }

    /// Parses one `x,y` vertex per line; blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { path: source.to_string(), line: lineno + 1, msg };
            let mut parts = line.split(',');
            let (Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!("expected \"x,y\", found {line:?}")));
            };
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
            vertices.push([parse(x)?, parse(y)?]);
        }
        Polygon::new(vertices)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Polygon::parse(&text, &path.display().to_string())
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    fn edge(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let (a, b) = self.edge(i);
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        0.5 * twice.abs()
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(dist2(a, b));
            }
        }
        d.sqrt()
    }

    /// Closest point on the polygon's boundary.
    pub fn nearest_boundary_point(&self, x: [f64; 2]) -> [f64; 2] {
        let mut best = (f64::INFINITY, x);
        for i in 0..self.vertices.len() {
            let (a, b) = self.edge(i);
            let c = closest_on_segment(x, a, b);
            let d = dist2(&x, &c);
            if d < best.0 {
                best = (d, c);
            }
        }
        best.1
    }

    /// Even-odd ray casting; points on an edge count as inside.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        let tol = BOUNDARY_TOL * self.diameter().max(1.0);
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = self.edge(i);
            if point_segment_dist2(x, a, b) <= tol * tol {
                return true;
            }
            if (a[1] > x[1]) != (b[1] > x[1]) {
                let t = (x[1] - a[1]) / (b[1] - a[1]);
                if x[0] < a[0] + t * (b[0] - a[0]) {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Least-squares non-decreasing fit (pool adjacent violators), in place.
fn isotonic(x: &mut [f64]) {
    // blocks of (mean, size)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(x.len());
    for &v in x.iter() {
        blocks.push((v, 1));
        while blocks.len() > 1 && blocks[blocks.len() - 2].0 > blocks[blocks.len() - 1].0 {
            let (b, nb) = blocks.pop().unwrap();
            let (a, na) = blocks.pop().unwrap();
            blocks.push(((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb));
        }
    }
    let mut i = 0;
    for (v, n) in blocks {
        x[i..i + n].iter_mut().for_each(|e| *e = v);
        i += n;
    }
}

fn closest_on_segment(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    };
    [a[0] + t * ab[0], a[1] + t * ab[1]]
}

fn point_segment_dist2(x: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
    dist2(&x, &c)
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon {
        Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn containment_examples() {
        assert!(Region::Hypercube(2).contains(&[0.5, 0.5]).unwrap());
        assert!(!Region::Simplex(2).contains(&[0.7, 0.3]).unwrap());
        assert!(Region::Simplex(2).contains(&[0.3, 0.7]).unwrap());
        assert!(Region::Ball(3).contains(&[1.0, 0.0, 0.0]).unwrap());
        assert!(!Region::Ball(3).contains(&[1.0, 0.01, 0.0]).unwrap());
        assert!(matches!(
            Region::Ball(3).contains(&[0.0, 0.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn polygon_boundary_counts_inside() {
        let sq = unit_square();
        assert!(sq.contains([0.0, 0.5]));
        assert!(sq.contains([1.0, 1.0]));
        assert!(sq.contains([0.5, 0.5]));
        assert!(!sq.contains([1.0 + 1e-6, 0.5]));
        let tri = Region::Polygon(Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]).unwrap());
        assert!(tri.contains(&[1.0, 1.0]).unwrap());
        assert!(!tri.contains(&[1.2, 1.0]).unwrap());
    }

    #[test]
    fn invalid_polygons_are_rejected() {
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_err());
        // bow tie
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(Region::hypercube(0).is_err());
    }

    #[test]
    fn polygon_text_format() {
        let p = Polygon::parse("0,0\n1,0\n\n# top\n1,1\n0,1\n", "sq").unwrap();
        assert_eq!(p, unit_square());
        assert!((p.area() - 1.0).abs() < 1e-15);
        match Polygon::parse("0,0\n1;0\n1,1\n", "bad.txt") {
            Err(Error::Parse { line, path, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(path, "bad.txt");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn transform_examples() {
        let u = [0.1, 0.7, 0.3];
        assert_eq!(Region::Hypercube(3).inverse_rosenblatt(&u).unwrap(), u.to_vec());
        for p in 1..=6 {
            let x = Region::Ball(p).inverse_rosenblatt(&vec![0.5; p]).unwrap();
            let r2: f64 = x.iter().map(|v| v * v).sum();
            assert!(r2 < 1.0, "p = {p}");
        }
        let x = Region::Simplex(4).inverse_rosenblatt(&[0.9, 0.2, 0.5, 0.99]).unwrap();
        assert!(Region::Simplex(4).contains(&x).unwrap());
        assert!(matches!(
            Region::Polygon(unit_square()).inverse_rosenblatt(&[0.5, 0.5]),
            Err(Error::UnsupportedTransform(_))
        ));
    }

    #[test]
    fn sine_power_cdf_inverts() {
        for m in 0..7 {
            let total = sine_power_integral(m, PI);
            for &u in &[1e-9, 0.01, 0.3, 0.5, 0.77, 0.999] {
                let phi = inverse_sine_power_cdf(m, u);
                assert!((sine_power_integral(m, phi) / total - u).abs() < 1e-12, "m={m} u={u}");
            }
        }
    }

    #[test]
    fn clip_examples() {
        let cands = PointSet::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let r = Region::Hypercube(2);
        assert_eq!(clip_to_region(&r, &[0.3, 0.4], &cands).unwrap(), vec![0.3, 0.4]);
        assert_eq!(clip_to_region(&r, &[1.3, 0.9], &cands).unwrap(), vec![1.0, 1.0]);
        let grid = PointSet::new(1, (0..=1000).map(|i| i as f64 / 1000.0).collect()).unwrap();
        let c = clip_to_region(&Region::Hypercube(1), &[1.7], &grid).unwrap();
        assert!((c[0] - 1.0).abs() <= 1e-3);
        let empty = PointSet::zeros(0, 2);
        assert!(matches!(clip_to_region(&r, &[0.3, 0.4], &empty), Err(Error::EmptyCandidates)));
    }

    #[test]
    fn volumes() {
        assert!((Region::Ball(2).volume() - PI).abs() < 1e-14);
        assert!((Region::Ball(3).volume() - 4.0 / 3.0 * PI).abs() < 1e-14);
        assert!((Region::Simplex(3).volume() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn projection_lands_on_the_nearest_feasible_point() {
        use rand::Rng;
        let mut rng = crate::lds::RngSeed(6).rng();
        let square = Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]).unwrap();
        let regions = [
            Region::Hypercube(3),
            Region::Simplex(3),
            Region::Ball(3),
            Region::Polygon(square),
        ];
        for region in &regions {
            let p = region.dim();
            for _ in 0..200 {
                let x: Vec<f64> = (0..p).map(|_| rng.gen::<f64>() * 4.0 - 1.5).collect();
                let mut y = x.clone();
                region.project(&mut y).unwrap();
                assert!(region.contains(&y).unwrap(), "{region} {x:?} -> {y:?}");
                if region.contains(&x).unwrap() {
                    assert_eq!(x, y);
                }
                // no random feasible point is closer
                let (lo, hi) = region.bounding_box();
                let best = dist2(&x, &y);
                for _ in 0..300 {
                    let z: Vec<f64> = (0..p).map(|k| lo[k] + rng.gen::<f64>() * (hi[k] - lo[k])).collect();
                    if region.contains(&z).unwrap() {
                        assert!(dist2(&x, &z) >= best - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn isotonic_fit_examples() {
        let mut x = [3.0, 1.0, 2.0];
        isotonic(&mut x);
        assert_eq!(x, [2.0, 2.0, 2.0]);
        let mut x = [0.1, 0.5, 0.3, 0.9];
        isotonic(&mut x);
        assert_eq!(x, [0.1, 0.4, 0.4, 0.9]);
    }
}
