//! Low-discrepancy and seeded random point generation.
//!
//! The Sobol' generator uses the Joe–Kuo direction numbers bundled in
//! `data/joe-kuo-1111.txt`. Each line after the header is
//! `d s a m_1 .. m_s`: the dimension, the degree of its primitive polynomial,
//! the polynomial's interior coefficients packed as an integer, and the
//! initial direction numbers. Dimension 1 is the van der Corput sequence and
//! has no line.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::points::PointSet;
use crate::region::Region;

/// Highest dimension covered by the bundled direction numbers.
pub const MAX_SOBOL_DIM: usize = 1111;

const BITS: usize = 32;
const TABLE: &str = include_str!("../data/joe-kuo-1111.txt");

/// Seed of every random stream in the crate. Equal seeds and parameters give
/// bit-identical output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// An independent child seed for sub-stream `stream`.
    pub fn derive(self, stream: u64) -> RngSeed {
        RngSeed(splitmix64(self.0 ^ splitmix64(stream.wrapping_add(0x9E37_79B9_7F4A_7C15))))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for RngSeed {
    fn from(s: u64) -> Self {
        RngSeed(s)
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn direction_numbers() -> &'static [[u32; BITS]] {
    static DIRS: OnceLock<Vec<[u32; BITS]>> = OnceLock::new();
    DIRS.get_or_init(|| {
        let mut dirs = Vec::with_capacity(MAX_SOBOL_DIM);
        let mut first = [0u32; BITS];
        for (b, v) in first.iter_mut().enumerate() {
            *v = 1 << (BITS - 1 - b);
        }
        dirs.push(first);
        for line in TABLE.lines().skip(1) {
            let fields: Vec<u32> = line.split_whitespace().map(|t| t.parse().expect("direction table")).collect();
            let (s, a, m) = (fields[1] as usize, fields[2], &fields[3..]);
            let mut v = [0u32; BITS];
            for b in 0..BITS {
                v[b] = if b < s {
                    m[b] << (BITS - 1 - b)
                } else {
                    let mut x = v[b - s] ^ (v[b - s] >> s);
                    for k in 1..s {
                        if (a >> (s - 1 - k)) & 1 == 1 {
                            x ^= v[b - k];
                        }
                    }
                    x
                };
            }
            dirs.push(v);
        }
        assert_eq!(dirs.len(), MAX_SOBOL_DIM);
        dirs
    })
}

fn check_sobol_dim(p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidConfig("Sobol' dimension must be positive".into()));
    }
    if p > MAX_SOBOL_DIM {
        return Err(Error::SobolDimension { requested: p, limit: MAX_SOBOL_DIM });
    }
    Ok(())
}

/// Fills `out` (rows of length `p`) with the raw 32-bit Sobol' integers of
/// sequence indices `start, start + 1, ...`.
fn sobol_bits(start: u64, p: usize, out: &mut [u32]) {
    let dirs = direction_numbers();
    let gray = start ^ (start >> 1);
    let mut state = vec![0u32; p];
    for (d, s) in state.iter_mut().enumerate() {
        for b in 0..BITS {
            if (gray >> b) & 1 == 1 {
                *s ^= dirs[d][b];
            }
        }
    }
    for (k, row) in out.chunks_exact_mut(p).enumerate() {
        if k > 0 {
            // Gray-code step from index i-1 to i flips the lowest zero bit of i-1.
            let c = (start + k as u64 - 1).trailing_ones() as usize;
            for (d, s) in state.iter_mut().enumerate() {
                *s ^= dirs[d][c];
            }
        }
        row.copy_from_slice(&state);
    }
}

fn bits_to_points(n: usize, p: usize, start: u64, map: impl Fn(usize, u32) -> f64 + Sync + Send) -> PointSet {
    let mut data = vec![0.0; n * p];
    par::for_each_chunk_mut(&mut data, par::CHUNK * p, |c, chunk| {
        let first = start + (c * par::CHUNK) as u64;
        let mut bits = vec![0u32; chunk.len()];
        sobol_bits(first, p, &mut bits);
        for (k, (x, b)) in chunk.iter_mut().zip(&bits).enumerate() {
            *x = map(k % p, *b);
        }
    });
    PointSet::new(p, data).expect("p > 0")
}

const INV_2_32: f64 = 1.0 / 4_294_967_296.0;

/// First `n` points of the `p`-dimensional Sobol' sequence, skipping the
/// initial all-zeros point.
pub fn sobol(n: usize, p: usize) -> Result<PointSet> {
    check_sobol_dim(p)?;
    Ok(bits_to_points(n, p, 1, |_, b| b as f64 * INV_2_32))
}

/// Owen-scrambled Sobol' points (nested uniform digit scrambling over 32
/// bits). Unlike [`sobol`] the leading point is kept: scrambling moves it off
/// the origin, and keeping it preserves the dyadic stratification of the
/// first `2^k` points.
pub fn scrambled_sobol(n: usize, p: usize, seed: RngSeed) -> Result<PointSet> {
    check_sobol_dim(p)?;
    let dim_seeds: Vec<u64> = (0..p).map(|d| seed.derive(d as u64).0).collect();
    Ok(bits_to_points(n, p, 0, |d, b| owen_scramble(b, dim_seeds[d]) as f64 * INV_2_32))
}

/// Flips each bit with a coin that depends on the seed, the bit level and all
/// higher-order bits of the input.
fn owen_scramble(x: u32, seed: u64) -> u32 {
    let mut out = 0u32;
    for level in 0..BITS {
        let prefix = if level == 0 { 0 } else { (x >> (BITS - level)) as u64 };
        let coin = splitmix64(seed ^ ((level as u64) << 32 | prefix)) & 1;
        let bit = (x >> (BITS - 1 - level)) & 1;
        out |= (bit ^ coin as u32) << (BITS - 1 - level);
    }
    out
}

/// `n` uniform points of the region: a scrambled Sobol' sample pushed through
/// the inverse Rosenblatt transform, or seeded rejection samples for
/// polygons. Used to initialize designs.
pub fn scrambled_points(region: &Region, n: usize, seed: RngSeed) -> Result<PointSet> {
    if let Region::Polygon(_) = region {
        return rejection_sample(region, n, seed);
    }
    let mut pts = scrambled_sobol(n, region.dim(), seed)?;
    transform_rows(region, &mut pts)?;
    Ok(pts)
}

fn transform_rows(region: &Region, pts: &mut PointSet) -> Result<()> {
    let p = pts.dim();
    let mut tmp = vec![0.0; p];
    for row in pts.rows_mut() {
        region.inverse_rosenblatt_into(row, &mut tmp)?;
        row.copy_from_slice(&tmp);
    }
    Ok(())
}

fn rejection_sample(region: &Region, n: usize, seed: RngSeed) -> Result<PointSet> {
    let (lo, hi) = region.bounding_box();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let rate = region.volume() / box_volume;
    if !(rate >= 1e-3) {
        return Err(Error::DegeneratePolygon { rate });
    }
    let p = region.dim();
    let mut rng = seed.rng();
    let mut pts = PointSet::zeros(0, p);
    let mut x = vec![0.0; p];
    while pts.len() < n {
        for (k, v) in x.iter_mut().enumerate() {
            *v = lo[k] + (hi[k] - lo[k]) * rng.gen::<f64>();
        }
        if region.contains_unchecked(&x) {
            pts.push(&x);
        }
    }
    Ok(pts)
}

/// The `N` points standing in for the region in every integral and supremum.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    points: PointSet,
    region: Region,
}

impl CandidateSet {
    /// Sobol' points through the inverse Rosenblatt transform; polygons use
    /// seeded rejection sampling (the seed is ignored otherwise).
    pub fn generate(region: &Region, count: usize, seed: RngSeed) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyCandidates);
        }
        let points = match region {
            Region::Polygon(_) => rejection_sample(region, count, seed)?,
            _ => {
                let mut pts = sobol(count, region.dim())?;
                transform_rows(region, &mut pts)?;
                pts
            }
        };
        Ok(Self { points, region: region.clone() })
    }

    /// Wraps explicit points; every point must lie in the region.
    pub fn from_points(region: &Region, points: PointSet) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        if points.dim() != region.dim() {
            return Err(Error::DimensionMismatch { expected: region.dim(), got: points.dim() });
        }
        if let Some(i) = points.rows().position(|r| !region.contains_unchecked(r)) {
            return Err(Error::InvalidRegion(format!("candidate {i} lies outside {region}")));
        }
        Ok(Self { points, region: region.clone() })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn region(&self) -> &Region {
        &self.region
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

    pub fn row(&self, j: usize) -> &[f64] {
        self.points.row(j)
    }

    /// Number of rows equal to an earlier row.
    pub fn duplicate_count(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = self.points.rows().map(|r| r.iter().map(|v| v.to_bits()).collect()).collect();
        rows.sort_unstable();
        rows.windows(2).filter(|w| w[0] == w[1]).count()
    }
}

/// Shorthand for [`CandidateSet::generate`].
pub fn candidate_set(region: &Region, count: usize, seed: RngSeed) -> Result<CandidateSet> {
    CandidateSet::generate(region, count, seed)
}
