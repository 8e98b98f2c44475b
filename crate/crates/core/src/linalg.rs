// SPDX-License-Identifier: Apache-2.0

//! Small dense complex solves with partial pivoting.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::MAX_CONDITION;

/// Solution of `A x = b` together with the 1-norm condition estimate of `A`.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: Vec<Complex64>,
    pub condition: f64,
}

/// Solves a square system by LU with partial pivoting.
///
/// `rows` are the matrix rows; fails with [`Error::SingularSystem`] when the
/// matrix is singular or its condition estimate exceeds [`MAX_CONDITION`].
pub fn solve_dense(rows: &[Vec<Complex64>], rhs: &[Complex64]) -> Result<DenseSolution> {
    let n = rhs.len();
    assert!(
        rows.len() == n && rows.iter().all(|r| r.len() == n),
        "square system expected"
    );

    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lu = a.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })?;
    let condition = norm1(&a) * norm1(&inverse);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularSystem { condition });
    }
    let x = lu
        .solve(&DVector::from_column_slice(rhs))
        .ok_or(Error::SingularSystem { condition })?;
    Ok(DenseSolution {
        x: x.iter().copied().collect(),
        condition,
    })
}

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
