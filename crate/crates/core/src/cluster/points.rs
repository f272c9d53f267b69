use serde::ser::{Serialize, SerializeSeq, Serializer};

use super::ClusterError;
use crate::scalar::Scalar;

/// Dense row-major point matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Points<T> {
    data: Vec<T>,
    dim: usize,
}

impl<T: Scalar> Points<T> {
    pub fn new(data: Vec<T>, dim: usize) -> Result<Self, ClusterError> {
        if dim == 0 {
            if data.is_empty() {
                return Ok(Points { data, dim });
            }
            return Err(ClusterError::Dimension {
                expected: 0,
                got: data.len(),
            });
        }
        if !data.len().is_multiple_of(dim) {
            return Err(ClusterError::Dimension {
                expected: dim,
                got: data.len() % dim,
            });
        }
        Ok(Points { data, dim })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, ClusterError> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(ClusterError::Dimension {
                expected: dim,
                got: bad.len(),
            });
        }
        Points::new(rows.concat(), dim)
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn select(&self, indices: &[usize]) -> Points<T> {
        let data = indices.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        Points { data, dim: self.dim }
    }

    pub fn to_vecs(&self) -> Vec<Vec<T>> {
        self.rows().map(<[T]>::to_vec).collect()
    }
}

pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

impl<T: Serialize> Serialize for Points<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = self.data.chunks_exact(self.dim.max(1));
        let mut seq = serializer.serialize_seq(Some(rows.len()))?;
        for r in rows {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}
