use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major set of `n` points in dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    data: Vec<T>,
    dim: usize,
}

impl<T: Scalar> PointSet<T> {
    pub fn from_flat(data: Vec<T>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid_argument("points", "dimension must be at least 1"));
        }
        if data.len() % dim != 0 {
            return Err(Error::invalid_argument(
                "points",
                format!("{} values do not split into rows of length {dim}", data.len()),
            ));
        }
        Ok(Self { data, dim })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::invalid_argument(
                    "points",
                    format!("row {i} has length {}, expected {dim}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Self::from_flat(data, dim)
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
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.rows().map(<[T]>::to_vec).collect()
    }

    pub fn cast<U: Scalar>(&self) -> PointSet<U> {
        PointSet {
            data: self.data.iter().map(|&x| U::lit(x.as_f64())).collect(),
            dim: self.dim,
        }
    }

    /// Arithmetic mean of the rows.
    pub fn mean(&self) -> Vec<T> {
        let mut m = vec![T::zero(); self.dim];
        for r in self.rows() {
            for (a, &b) in m.iter_mut().zip(r) {
                *a += b;
            }
        }
        let n = T::from_count(self.len().max(1));
        m.iter_mut().for_each(|a| *a /= n);
        m
    }
}
