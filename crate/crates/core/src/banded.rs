//! Block-tridiagonal linear systems with `D×D` blocks, optionally closed
//! periodically (corner blocks coupling the first and last block rows).
//!
//! The scalar tridiagonal case is `D = 1`. Non-periodic systems are solved
//! with the block Thomas recurrence; periodic systems reduce to two
//! non-periodic solves of size `n - 1` with a bordered correction for the
//! last block unknown.

use nalgebra::{SMatrix, SVector};
use thiserror::Error;

pub type Block<const D: usize> = SMatrix<f64, D, D>;
pub type BlockVector<const D: usize> = SVector<f64, D>;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SolveError {
    #[error("singular pivot block at row {0}")]
    SingularPivot(usize),
    #[error("dimension mismatch: matrix has {expected} block rows, right-hand side {found}")]
    Dimension { expected: usize, found: usize },
}

/// Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = b[i]`.
/// `lower[0]` and `upper[n-1]` are the periodic corner blocks and are
/// ignored for non-periodic systems.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTridiagonal<const D: usize> {
    pub lower: Vec<Block<D>>,
    pub diag: Vec<Block<D>>,
    pub upper: Vec<Block<D>>,
    pub periodic: bool,
}

/// Scalar tridiagonal system.
pub type Tridiagonal = BlockTridiagonal<1>;

impl<const D: usize> BlockTridiagonal<D> {
    pub fn identity(n: usize, periodic: bool) -> Self {
        Self {
            lower: vec![Block::zeros(); n],
            diag: vec![Block::identity(); n],
            upper: vec![Block::zeros(); n],
            periodic,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Block `(i, j)` of the full matrix.
    pub fn block(&self, i: usize, j: usize) -> Block<D> {
        let n = self.len();
        let mut out = Block::zeros();
        if i == j {
            out += self.diag[i];
        }
        if n > 1 {
            let prev = if i > 0 {
                Some(i - 1)
            } else if self.periodic {
                Some(n - 1)
            } else {
                None
            };
            let next = if i + 1 < n {
                Some(i + 1)
            } else if self.periodic {
                Some(0)
            } else {
                None
            };
            if prev == Some(j) {
                out += self.lower[i];
            }
            if next == Some(j) {
                out += self.upper[i];
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[BlockVector<D>]) -> Vec<BlockVector<D>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if n > 1 {
                    if i > 0 {
                        y += self.lower[i] * x[i - 1];
                    } else if self.periodic {
                        y += self.lower[0] * x[n - 1];
                    }
                    if i + 1 < n {
                        y += self.upper[i] * x[i + 1];
                    } else if self.periodic {
                        y += self.upper[n - 1] * x[0];
                    }
                }
                y
            })
            .collect()
    }

    pub fn solve(&self, rhs: &[BlockVector<D>]) -> Result<Vec<BlockVector<D>>, SolveError> {
        let n = self.len();
        if rhs.len() != n {
            return Err(SolveError::Dimension { expected: n, found: rhs.len() });
        }
        if !self.periodic || n == 1 {
            let mut x = rhs.to_vec();
            thomas(&self.lower, &self.diag, &self.upper, &mut x)?;
            return Ok(x);
        }
        if n == 2 {
            return self.solve_two_periodic(rhs);
        }
        self.solve_periodic(rhs)
    }

    fn solve_two_periodic(&self, rhs: &[BlockVector<D>]) -> Result<Vec<BlockVector<D>>, SolveError> {
        // Both neighbours of each row are the other row.
        let lower = [Block::zeros(), self.lower[1] + self.upper[1]];
        let upper = [self.lower[0] + self.upper[0], Block::zeros()];
        let mut x = rhs.to_vec();
        thomas(&lower, &self.diag, &upper, &mut x)?;
        Ok(x)
    }

    fn solve_periodic(&self, rhs: &[BlockVector<D>]) -> Result<Vec<BlockVector<D>>, SolveError> {
        let n = self.len();
        let m = n - 1;
        // x_i = y_i + Z_i x_last for i < n-1, with T y = b and T Z = -(coupling to x_last).
        let mut y = rhs[..m].to_vec();
        thomas(&self.lower[..m], &self.diag[..m], &self.upper[..m], &mut y)?;
        let mut cols: Vec<Block<D>> = vec![Block::zeros(); m];
        cols[0] = -self.lower[0];
        cols[m - 1] -= self.upper[m - 1];
        thomas(&self.lower[..m], &self.diag[..m], &self.upper[..m], &mut cols)?;

        let last = n - 1;
        let schur = self.diag[last] + self.lower[last] * cols[m - 1] + self.upper[last] * cols[0];
        let reduced = rhs[last] - self.lower[last] * y[m - 1] - self.upper[last] * y[0];
        let inv = invert(&schur, last)?;
        let x_last = inv * reduced;
        let mut x: Vec<BlockVector<D>> = y.iter().zip(&cols).map(|(yi, zi)| yi + zi * x_last).collect();
        x.push(x_last);
        Ok(x)
    }
}

fn invert<const D: usize>(block: &Block<D>, row: usize) -> Result<Block<D>, SolveError> {
    match block.try_inverse() {
        Some(inv) if inv.iter().all(|v| v.is_finite()) => Ok(inv),
        _ => Err(SolveError::SingularPivot(row)),
    }
}

/// Block Thomas recurrence on a non-periodic system, in place. The
/// right-hand side may carry `C` columns per block row.
fn thomas<const D: usize, const C: usize>(
    lower: &[Block<D>],
    diag: &[Block<D>],
    upper: &[Block<D>],
    x: &mut [SMatrix<f64, D, C>],
) -> Result<(), SolveError> {
    let n = diag.len();
    let mut c_prime: Vec<Block<D>> = Vec::with_capacity(n);
    let mut inv = invert(&diag[0], 0)?;
    c_prime.push(inv * upper[0]);
    x[0] = inv * x[0];
    for i in 1..n {
        let pivot = diag[i] - lower[i] * c_prime[i - 1];
        inv = invert(&pivot, i)?;
        c_prime.push(inv * upper[i]);
        x[i] = inv * (x[i] - lower[i] * x[i - 1]);
    }
    for i in (0..n - 1).rev() {
        x[i] -= c_prime[i] * x[i + 1];
    }
    Ok(())
}
