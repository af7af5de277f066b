//! Named parameter tensors shared by all models, the optimizer and checkpoints.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Row-major `rows x cols` matrix; vectors have `cols == 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tensor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(name: &str, rows: usize, cols: usize) -> Self {
        Self {
            name: name.into(),
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Uniform Glorot initialization.
    pub fn glorot(name: &str, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Self {
        let r = libm::sqrt(6.0 / (rows + cols) as f64);
        Self {
            name: name.into(),
            rows,
            cols,
            data: (0..rows * cols).map(|_| rng.gen_range(-r..r)).collect(),
        }
    }

    /// `self * x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(w, v)| w * v).sum())
            .collect()
    }

    /// `self^T * y`
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (row, &yi) in self.data.chunks_exact(self.cols).zip(y) {
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * yi;
            }
        }
        out
    }

    /// `self += a * b^T`
    pub fn add_outer(&mut self, a: &[f64], b: &[f64]) {
        for (row, &ai) in self.data.chunks_exact_mut(self.cols).zip(a) {
            for (w, &bj) in row.iter_mut().zip(b) {
                *w += ai * bj;
            }
        }
    }

    pub fn add(&mut self, v: &[f64]) {
        for (w, x) in self.data.iter_mut().zip(v) {
            *w += x;
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamSet {
    pub tensors: Vec<Tensor>,
}

impl ParamSet {
    pub fn zeros_like(&self) -> Self {
        Self {
            tensors: self
                .tensors
                .iter()
                .map(|t| Tensor::zeros(&t.name, t.rows, t.cols))
                .collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.tensors.iter_mut().find(|t| t.name == name)
    }

    /// Total scalar count.
    pub fn size(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    pub fn scale(&mut self, s: f64) {
        for t in &mut self.tensors {
            t.data.iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors
            .iter()
            .all(|t| t.data.iter().all(|x| x.is_finite()))
    }

    /// Checks that `other` has the same tensor names and shapes, in order.
    pub fn check_layout(&self, other: &ParamSet) -> Result<()> {
        if self.tensors.len() != other.tensors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.tensors.len(),
                found: other.tensors.len(),
            });
        }
        for (a, b) in self.tensors.iter().zip(&other.tensors) {
            if a.name != b.name
                || a.rows != b.rows
                || a.cols != b.cols
                || b.data.len() != b.rows * b.cols
            {
                return Err(Error::Validation(alloc::format!(
                    "tensor {} ({}x{}) does not match {} ({}x{})",
                    b.name,
                    b.rows,
                    b.cols,
                    a.name,
                    a.rows,
                    a.cols
                )));
            }
        }
        Ok(())
    }
}
