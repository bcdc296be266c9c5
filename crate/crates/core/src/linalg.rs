//! Dense matrices over a tower field: rank, determinant, inverse.

use crate::field_tower::{Tower, TowerElement};

pub type Matrix = Vec<Vec<TowerElement>>;

pub fn identity(tower: &Tower, n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { tower.one() } else { tower.zero() }).collect()).collect()
}

pub fn mat_mul(tower: &Tower, a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner);
            (0..cols).map(|j| (0..inner).fold(tower.zero(), |acc, k| &acc + &(&row[k] * &b[k][j]))).collect()
        })
        .collect()
}

/// Applies `x -> x^{p^d}` entrywise.
pub fn frobenius(a: &Matrix, d: u32) -> Matrix {
    a.iter().map(|row| row.iter().map(|x| x.pth_power(d)).collect()).collect()
}

/// Row echelon form by Gaussian elimination; returns the rank and the sign-
/// adjusted product of pivots (the determinant when square).
fn eliminate(tower: &Tower, mut m: Matrix) -> (usize, TowerElement) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut det = tower.one();
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            det = tower.zero();
            continue;
        };
        if piv != rank {
            m.swap(piv, rank);
            det = -det;
        }
        let pinv = m[rank][col].inv().expect("pivot is nonzero");
        det = &det * &m[rank][col];
        for r in rank + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &pinv;
            for c in col..cols {
                let t = &f * &m[rank][c];
                m[r][c] = &m[r][c] - &t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    (rank, det)
}

pub fn rank(tower: &Tower, m: &Matrix) -> usize {
    eliminate(tower, m.clone()).0
}

pub fn determinant(tower: &Tower, m: &Matrix) -> TowerElement {
    assert!(m.iter().all(|r| r.len() == m.len()), "determinant of a non-square matrix");
    if m.is_empty() {
        return tower.one();
    }
    let (rank, det) = eliminate(tower, m.clone());
    if rank < m.len() {
        tower.zero()
    } else {
        det
    }
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn inverse(tower: &Tower, m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "inverse of a non-square matrix");
    let mut a = m.clone();
    let mut inv = identity(tower, n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let pinv = a[col][col].inv().ok()?;
        for c in 0..n {
            a[col][c] = &a[col][c] * &pinv;
            inv[col][c] = &inv[col][c] * &pinv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let t = &f * &a[col][c];
                a[r][c] = &a[r][c] - &t;
                let t = &f * &inv[col][c];
                inv[r][c] = &inv[r][c] - &t;
            }
        }
    }
    Some(inv)
}
