//! Compressed sparse rows and a Jacobi-preconditioned conjugate gradient.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error(
        "conjugate gradient stalled after {iterations} iterations (relative residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },
    #[error("matrix is not positive definite (breakdown at iteration {0})")]
    Indefinite(usize),
}

/// Square sparse matrix in CSR layout with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix whose pattern couples every pair of nodes sharing a triangle.
    pub fn from_triangles(n: usize, triangles: &[[usize; 3]]) -> Self {
        let mut adj: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for t in triangles {
            for &a in t {
                for &b in t {
                    adj[a].push(b);
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for mut row in adj {
            row.sort_unstable();
            row.dedup();
            cols.extend(row);
            row_ptr.push(cols.len());
        }
        let nnz = cols.len();
        Self {
            n,
            row_ptr,
            cols,
            values: vec![0.0; nnz],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn index(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    /// Accumulate into an existing pattern entry.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .index(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) is outside the sparsity pattern"));
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.index(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    /// `|A| |x|`, the scale of the rounding error in `A x`.
    pub fn abs_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| (self.values[k] * x[self.cols[k]]).abs())
                    .sum()
            })
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `a * self + b * other`; both must share a pattern.
    pub fn combine(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        assert_eq!(self.cols, other.cols, "patterns differ");
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v = a * *v + b * w;
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v).sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Principal submatrix on `keep` (given as old → new index map).
    pub fn restrict(&self, map: &[Option<usize>], m: usize) -> CsrMatrix {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.n {
            if map[i].is_none() {
                continue;
            }
            for (j, v) in self.row(i) {
                if let Some(nj) = map[j] {
                    cols.push(nj);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            n: m,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (v - self.get(j, i)).abs() <= tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Residual norm below which `b − A x` is indistinguishable from rounding.
fn rounding_floor(a: &CsrMatrix, b: &[f64], x: &[f64]) -> f64 {
    let scale: f64 = a
        .abs_mul_vec(x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| (ax + bi.abs()).powi(2))
        .sum::<f64>()
        .sqrt();
    64.0 * f64::EPSILON * scale
}

/// Jacobi-preconditioned conjugate gradient for a symmetric positive
/// definite `a`, starting from the guess in `x`.
///
/// Stops when `‖b − A x‖ ≤ tol·‖b‖`, or when the true residual has reached
/// the rounding floor of its own evaluation.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgReport, LinalgError> {
    let n = a.dim();
    let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgReport {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut ax = vec![0.0; n];
    a.mul_vec(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut rel = norm(&r) / bnorm;
    if rel <= tol {
        return Ok(CgReport {
            iterations: 0,
            relative_residual: rel,
        });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.mul_vec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(LinalgError::Indefinite(it));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm(&r) / bnorm;
        let mut restart = false;
        if rel <= tol {
            a.mul_vec(x, &mut ax);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
            rel = norm(&r) / bnorm;
            if rel <= tol || norm(&r) <= rounding_floor(a, b, x) {
                return Ok(CgReport {
                    iterations: it,
                    relative_residual: rel,
                });
            }
            // the recursive residual drifted: restart from the true one
            restart = true;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = if restart { 0.0 } else { rz_new / rz };
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(LinalgError::NotConverged {
        iterations: max_iter,
        residual: rel,
    })
}
