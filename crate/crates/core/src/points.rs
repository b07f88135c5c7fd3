use crate::error::{Error, Result};

/// A row-major `len x dim` matrix of points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("point dimension must be positive".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidConfig(format!(
                "{} coordinates do not split into rows of length {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(len: usize, dim: usize) -> Self {
        assert!(dim > 0);
        Self { dim, data: vec![0.0; len * dim] }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn rows_mut(&mut self) -> std::slice::ChunksExactMut<'_, f64> {
        self.data.chunks_exact_mut(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.dim);
        self.data.extend_from_slice(row);
    }

    /// Rows `idx` gathered into a new set, in the given order.
    pub fn select(&self, idx: &[usize]) -> PointSet {
        let mut data = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        PointSet { dim: self.dim, data }
    }

    /// First `len` rows.
    pub fn head(&self, len: usize) -> PointSet {
        PointSet { dim: self.dim, data: self.data[..len * self.dim].to_vec() }
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for r in self.rows() {
            for (a, b) in m.iter_mut().zip(r) {
                *a += b;
            }
        }
        let n = self.len() as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Coordinate-wise comparison of the two sets as unordered collections.
    pub fn set_eq(&self, other: &PointSet, tol: f64) -> bool {
        if self.dim != other.dim || self.len() != other.len() {
            return false;
        }
        fn sort(p: &PointSet) -> Vec<&[f64]> {
            let mut rows: Vec<&[f64]> = p.rows().collect();
            rows.sort_by(|a, b| {
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            rows
        }
        sort(self)
            .iter()
            .zip(sort(other).iter())
            .all(|(a, b)| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol))
    }
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(PointSet::from_rows(&[vec![0.0, 1.0], vec![2.0]]).is_err());
        assert!(PointSet::new(3, vec![0.0; 4]).is_err());
    }

    #[test]
    fn set_equality_ignores_order() {
        let a = PointSet::from_rows(&[[0.0, 1.0], [2.0, 3.0]]).unwrap();
        let b = PointSet::from_rows(&[[2.0, 3.0], [0.0, 1.0 + 1e-13]]).unwrap();
        assert!(a.set_eq(&b, 1e-12));
        assert!(!a.set_eq(&b.head(1), 1e-12));
    }
}
