//! Smith normal form over arbitrary-precision integers.
//!
//! Only the diagonal is needed (abelianization ranks and torsion), so no
//! transform matrices are tracked. Pivot selection is smallest nonzero
//! absolute value, which keeps entries tame on the sparse relator matrices
//! this crate produces.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Diagonal of the Smith normal form: non-negative entries, each dividing
/// the next, zeros trailing. Length is min(rows, cols).
#[allow(clippy::needless_range_loop)]
pub fn smith_diagonal(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let dim = rows.min(cols);
    let mut diag = vec![BigInt::zero(); dim];
    let mut k = 0;
    'outer: while k < dim {
        // smallest nonzero |entry| in the trailing submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if m[i][j].is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if m[i][j].magnitude() < m[pi][pj].magnitude() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break; // trailing submatrix is zero
        };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }

        // clear column k below the pivot
        for i in k + 1..rows {
            if m[i][k].is_zero() {
                continue;
            }
            let q = &m[i][k] / &m[k][k];
            if !q.is_zero() {
                for j in k..cols {
                    let sub = &q * &m[k][j];
                    m[i][j] -= sub;
                }
            }
            if !m[i][k].is_zero() {
                // remainder became a smaller pivot candidate
                continue 'outer;
            }
        }
        // clear row k right of the pivot
        for j in k + 1..cols {
            if m[k][j].is_zero() {
                continue;
            }
            let q = &m[k][j] / &m[k][k];
            if !q.is_zero() {
                for i in k..rows {
                    let sub = &q * &m[i][k];
                    m[i][j] -= sub;
                }
            }
            if !m[k][j].is_zero() {
                continue 'outer;
            }
        }
        // divisibility sweep: pivot must divide every remaining entry
        for i in k + 1..rows {
            for j in k + 1..cols {
                if m[i][j].is_zero() || (&m[i][j] % &m[k][k]).is_zero() {
                    continue;
                }
                // fold row i into row k and redo this pivot
                for jj in k..cols {
                    let add = m[i][jj].clone();
                    m[k][jj] += add;
                }
                continue 'outer;
            }
        }
        diag[k] = m[k][k].abs();
        k += 1;
    }
    diag
}
