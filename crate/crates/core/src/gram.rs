//! Symmetric Gram matrices over an exact scalar type.

use std::fmt;

use crate::error::{Error, Result};
use crate::padic::Scalar;

/// Inner product matrix of a lattice in some basis, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Scalar> GramMatrix<T> {
    /// Checks shape and symmetry. Nondegeneracy is checked lazily by the
    /// algorithms that need it.
    pub fn new(dim: usize, entries: Vec<T>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let g = GramMatrix { dim, entries };
        for i in 0..dim {
            for j in i + 1..dim {
                if g.get(i, j) != g.get(j, i) {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(g)
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            let got = rows.iter().map(Vec::len).sum();
            return Err(Error::Shape {
                expected: dim * dim,
                got,
            });
        }
        GramMatrix::new(dim, rows.into_iter().flatten().collect())
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        GramMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from_int(x)).collect())
                .collect(),
        )
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![T::zero(); n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = d.clone();
        }
        GramMatrix::new(n, entries)
    }

    pub fn diagonal_ints(diag: &[i64]) -> Result<Self> {
        GramMatrix::diagonal(&diag.iter().map(|&x| T::from_int(x)).collect::<Vec<_>>())
    }

    /// Block-diagonal sum, in order.
    pub fn block_diagonal(blocks: &[GramMatrix<T>]) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.dim).sum();
        let mut entries = vec![T::zero(); n * n];
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    entries[(offset + i) * n + offset + j] = b.get(i, j).clone();
                }
            }
            offset += b.dim;
        }
        GramMatrix::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.entries.chunks(self.dim)
    }

    pub fn scaled(&self, factor: &T) -> Self {
        GramMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|x| x.clone() * factor.clone())
                .collect(),
        }
    }

    /// `Pᵀ G P` for a square change of basis `P` given row-major.
    pub fn congruent(&self, p: &[T]) -> Result<Self> {
        let n = self.dim;
        if p.len() != n * n {
            return Err(Error::Shape {
                expected: n * n,
                got: p.len(),
            });
        }
        let mut gp = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + self.get(i, k).clone() * p[k * n + j].clone();
                }
                gp[i * n + j] = acc;
            }
        }
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + p[k * n + i].clone() * gp[k * n + j].clone();
                }
                out[i * n + j] = acc;
            }
        }
        GramMatrix::new(n, out)
    }

    /// Reorder the basis: new basis vector `i` is old vector `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for &i in perm {
            for &j in perm {
                entries.push(self.get(i, j).clone());
            }
        }
        GramMatrix { dim: n, entries }
    }

    /// Exact determinant by fraction-based elimination.
    pub fn determinant(&self) -> T {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return T::zero();
            };
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let f = a[r * n + col].clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for k in col..n {
                    let v = a[col * n + k].clone();
                    a[r * n + k] = a[r * n + k].clone() - f.clone() * v;
                }
            }
        }
        det
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(Scalar::is_integer)
    }
}

impl<T: fmt::Display> fmt::Display for GramMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
