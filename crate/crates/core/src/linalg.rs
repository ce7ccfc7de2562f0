//! Small dense exact linear algebra: determinants, inverses, congruence
//! diagonalization of symmetric forms and a Smith normal form over `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Field;

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn transpose(m: &[Vec<i64>]) -> IntMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j]).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `vᵀ G w`.
pub fn bilinear(g: &[Vec<i64>], v: &[i64], w: &[i64]) -> i64 {
    v.iter().zip(mat_vec(g, w)).map(|(a, b)| a * b).sum()
}

/// `Mᵀ G M`.
pub fn congruence(g: &[Vec<i64>], m: &[Vec<i64>]) -> IntMatrix {
    mat_mul(&transpose(m), &mat_mul(g, m))
}

pub fn negate(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

/// Exact integer determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn to_field<F: Field>(m: &[Vec<i64>]) -> Vec<Vec<F>> {
    m.iter()
        .map(|r| r.iter().map(|&x| F::from_int(x)).collect())
        .collect()
}

/// Gauss-Jordan inverse over a field; `None` when singular.
pub fn inverse<F: Field>(m: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut inv: Vec<Vec<F>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { F::one() } else { F::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].clone() / p.clone();
            inv[col][j] = inv[col][j].clone() / p.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = a[col][j].clone() * f.clone();
                    a[r][j] = a[r][j].clone() - t;
                    let t = inv[col][j].clone() * f.clone();
                    inv[r][j] = inv[r][j].clone() - t;
                }
            }
        }
    }
    Some(inv)
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix, by
/// congruence diagonalization over `F`.
pub fn inertia<F: Field>(m: &[Vec<F>]) -> (usize, usize, usize) {
    let n = m.len();
    let mut a: Vec<Vec<F>> = m.to_vec();
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(j, k);
                for row in a.iter_mut() {
                    row.swap(j, k);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // row_k += row_j, col_k += col_j; new pivot is 2 a[k][j]
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] = a[k][c].clone() + t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][k] = a[r][k].clone() + t;
                }
            } else {
                continue;
            }
        }
        let p = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone() / p.clone();
            for c in 0..n {
                let t = a[k][c].clone() * f.clone();
                a[i][c] = a[i][c].clone() - t;
            }
            for r in 0..n {
                let t = a[r][k].clone() * f.clone();
                a[r][i] = a[r][i].clone() - t;
            }
        }
    }
    let mut pos = 0;
    let mut neg = 0;
    let mut zero = 0;
    for (i, row) in a.iter().enumerate() {
        if row[i].is_positive() {
            pos += 1;
        } else if row[i].is_negative() {
            neg += 1;
        } else {
            zero += 1;
        }
    }
    (pos, neg, zero)
}

/// `P A Q = D` with `P`, `Q` unimodular and `D` diagonal (not necessarily in
/// divisibility-chain form).
#[derive(Debug, Clone)]
pub struct Diagonalized {
    pub p: Vec<Vec<BigInt>>,
    pub d: Vec<BigInt>,
    pub q: Vec<Vec<BigInt>>,
    pub rank: usize,
}

pub fn smith_diagonalize(a: &[Vec<BigInt>], cols: usize) -> Diagonalized {
    let m = a.len();
    let n = cols;
    let mut d: Vec<Vec<BigInt>> = a.to_vec();
    let mut p: Vec<Vec<BigInt>> = unit_big(m);
    let mut q: Vec<Vec<BigInt>> = unit_big(n);
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        d.swap(bi, t);
        p.swap(bi, t);
        swap_cols(&mut d, bj, t);
        swap_cols(&mut q, bj, t);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let f = d[i][t].div_floor(&d[t][t]);
                row_axpy(&mut d, i, t, &f);
                row_axpy(&mut p, i, t, &f);
                if !d[i][t].is_zero() {
                    d.swap(i, t);
                    p.swap(i, t);
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let f = d[t][j].div_floor(&d[t][t]);
                col_axpy(&mut d, j, t, &f);
                col_axpy(&mut q, j, t, &f);
                if !d[t][j].is_zero() {
                    swap_cols(&mut d, j, t);
                    swap_cols(&mut q, j, t);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        t += 1;
    }
    let rank = t;
    let diag = (0..m.min(n)).map(|i| d[i][i].clone()).collect();
    Diagonalized {
        p,
        d: diag,
        q,
        rank,
    }
}

fn unit_big(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row_i -= f * row_src
fn row_axpy(m: &mut [Vec<BigInt>], i: usize, src: usize, f: &BigInt) {
    let src_row = m[src].clone();
    for (x, s) in m[i].iter_mut().zip(src_row) {
        *x -= f * s;
    }
}

/// col_j -= f * col_src
fn col_axpy(m: &mut [Vec<BigInt>], j: usize, src: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[j] -= f * s;
    }
}
