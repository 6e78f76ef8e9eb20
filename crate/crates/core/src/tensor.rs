//! Dense real linear algebra for the energy model.
//!
//! Vectors are plain `[f64]` slices. [`Matrix`] is row-major and [`Tensor3`]
//! stores a `(n1, n2, n3)` array with the last index varying fastest; this
//! layout is also the on-disk layout of the model file.
//!
//! Sums are always accumulated left to right over the contracted index, so
//! results are reproducible bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Wraps row-major storage; fails unless `data.len() == rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len("Matrix::from_vec", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `self += alpha * outer(u, v)`.
    pub fn add_outer(&mut self, alpha: f64, u: &[f64], v: &[f64]) -> Result<()> {
        check_len("Matrix::add_outer", self.rows, u.len())?;
        check_len("Matrix::add_outer", self.cols, v.len())?;
        for (i, &ui) in u.iter().enumerate() {
            let s = alpha * ui;
            for (m, &vj) in self.row_mut(i).iter_mut().zip(v) {
                *m += s * vj;
            }
        }
        Ok(())
    }
}

/// Dense 3-mode tensor with shape `(n1, n2, n3)`.
///
/// In the energy model mode 1 indexes output coordinates, mode 2 the entity
/// embedding and mode 3 the relation embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    shape: (usize, usize, usize),
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        Self {
            shape: (n1, n2, n3),
            data: vec![0.0; n1 * n2 * n3],
        }
    }

    pub fn from_vec(shape: (usize, usize, usize), data: Vec<f64>) -> Result<Self> {
        check_len("Tensor3::from_vec", shape.0 * shape.1 * shape.2, data.len())?;
        Ok(Self { shape, data })
    }

    pub fn from_fn(
        shape: (usize, usize, usize),
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(shape.0 * shape.1 * shape.2);
        for i in 0..shape.0 {
            for j in 0..shape.1 {
                for k in 0..shape.2 {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { shape, data }
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let (_, n2, n3) = self.shape;
        self.data[(i * n2 + j) * n3 + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let (_, n2, n3) = self.shape;
        self.data[(i * n2 + j) * n3 + k] = value;
    }

    /// The matrix `t[:, :, k]`.
    pub fn mode3_slice(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.shape.0, self.shape.1, |i, j| self.get(i, j, k))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Matrix-vector product `m · v`.
pub fn matvec(m: &Matrix, v: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; m.rows];
    matvec_into(m, v, &mut out)?;
    Ok(out)
}

/// Writes `m · v` into `out`.
pub fn matvec_into(m: &Matrix, v: &[f64], out: &mut [f64]) -> Result<()> {
    check_len("matvec", m.cols, v.len())?;
    check_len("matvec", m.rows, out.len())?;
    for (i, o) in out.iter_mut().enumerate() {
        *o = dot_unchecked(m.row(i), v);
    }
    Ok(())
}

/// Transposed product `mᵀ · v`.
pub fn matvec_transposed(m: &Matrix, v: &[f64]) -> Result<Vec<f64>> {
    check_len("matvec_transposed", m.rows, v.len())?;
    let mut out = vec![0.0; m.cols];
    for (i, &vi) in v.iter().enumerate() {
        for (o, &mij) in out.iter_mut().zip(m.row(i)) {
            *o += mij * vi;
        }
    }
    Ok(out)
}

/// Inner product `Σ a_i b_i`.
pub fn dot(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len("dot", a.len(), b.len())?;
    Ok(dot_unchecked(a, b))
}

#[inline]
pub(crate) fn dot_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

/// Mode-3 vector-tensor product: `M[i, j] = Σ_k t[i, j, k] · v[k]`.
pub fn mode3_contract(t: &Tensor3, v: &[f64]) -> Result<Matrix> {
    let (n1, n2, n3) = t.shape;
    check_len("mode3_contract", n3, v.len())?;
    let data = t
        .data
        .chunks_exact(n3)
        .map(|fiber| dot_unchecked(fiber, v))
        .collect();
    Ok(Matrix {
        rows: n1,
        cols: n2,
        data,
    })
}

/// `y += alpha * x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) -> Result<()> {
    check_len("axpy", y.len(), x.len())?;
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
    Ok(())
}

pub fn norm(v: &[f64]) -> f64 {
    libm::sqrt(dot_unchecked(v, v))
}

pub fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}
