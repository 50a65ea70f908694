// SPDX-License-Identifier: Apache-2.0

//! Small dense linear algebra over any [`Scalar`].
//!
//! Exact instances pivot on the first nonzero entry; float instances use
//! partial pivoting. All routines are meant for constant-size systems.

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

fn pick_pivot<S: Scalar>(m: &Matrix<S>, col: usize, from: usize) -> Option<usize> {
    if S::EXACT {
        (from..m.len()).find(|&r| !m[r][col].is_zero())
    } else {
        let mut best: Option<(usize, f64)> = None;
        for (r, row) in m.iter().enumerate().skip(from) {
            let a = row[col].to_f64().abs();
            if a > 0.0 && best.is_none_or(|(_, b)| a > b) {
                best = Some((r, a));
            }
        }
        best.map(|(r, _)| r)
    }
}

/// Determinant of a square matrix.
pub fn determinant<S: Scalar>(mut m: Matrix<S>) -> S {
    let n = m.len();
    let mut det = S::one();
    for col in 0..n {
        let Some(p) = pick_pivot(&m, col, col) else {
            return S::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / pivot.clone();
            for c in col..n {
                let v = m[col][c].clone() * f.clone();
                m[r][c] = m[r][c].clone() - v;
            }
        }
        det = det * pivot;
    }
    det
}

/// Solves `a x = b` for square nonsingular `a`; `None` when singular.
pub fn solve<S: Scalar>(mut a: Matrix<S>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = a.len();
    for col in 0..n {
        let p = pick_pivot(&a, col, col)?;
        if a[p][col].is_negligible() && !S::EXACT {
            return None;
        }
        a.swap(p, col);
        b.swap(p, col);
        let pivot = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / pivot.clone();
            for c in col..n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
            let v = b[col].clone() * f;
            b[r] = b[r].clone() - v;
        }
    }
    Some(
        (0..n)
            .map(|i| b[i].clone() / a[i][i].clone())
            .collect(),
    )
}

/// Reduced row echelon form; returns pivot columns.
fn rref<S: Scalar>(m: &mut Matrix<S>, cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pick_pivot(m, c, r) else {
            continue;
        };
        if !S::EXACT && m[p][c].is_negligible() {
            // float: treat as numerically zero column
            let scale = m[p][c].to_f64().abs();
            if scale < 1e-14 {
                continue;
            }
        }
        m.swap(p, r);
        let pivot = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() / pivot.clone();
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for k in 0..cols {
                let v = m[r][k].clone() * f.clone();
                m[i][k] = m[i][k].clone() - v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the null space of an `rows x cols` matrix.
pub fn kernel<S: Scalar>(mut m: Matrix<S>, cols: usize) -> Vec<Vec<S>> {
    let pivots = rref(&mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// Rank of a matrix.
pub fn rank<S: Scalar>(mut m: Matrix<S>, cols: usize) -> usize {
    rref(&mut m, cols).len()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale<S: Scalar>(a: &[S], k: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * k.clone()).collect()
}

/// Generalized cross product: the vector `n` with `n . y = det[v_1; ..; v_{d-1}; y]`.
pub fn cross<S: Scalar>(vectors: &[Vec<S>], d: usize) -> Vec<S> {
    debug_assert_eq!(vectors.len() + 1, d);
    (0..d)
        .map(|i| {
            let mut m: Matrix<S> = vectors.to_vec();
            let mut e = vec![S::zero(); d];
            e[i] = S::one();
            m.push(e);
            determinant(m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        rational(n, 1)
    }

    #[test]
    fn determinant_exact() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        assert_eq!(determinant(m), q(5));
        let m = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(determinant(m), q(-1));
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(determinant(m), q(0));
    }

    #[test]
    fn solve_and_kernel() {
        let a = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        let x = solve(a, vec![q(3), q(1)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        let k = kernel(vec![vec![q(1), q(1), q(1)]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(dot(v, &[q(1), q(1), q(1)]), q(0));
        }
        assert!(solve(vec![vec![q(1), q(2)], vec![q(2), q(4)]], vec![q(1), q(1)]).is_none());
    }

    #[test]
    fn cross_matches_determinant() {
        let v = vec![vec![q(-1), q(1), q(0)], vec![q(-1), q(0), q(1)]];
        assert_eq!(cross(&v, 3), vec![q(1), q(1), q(1)]);
        let n: Vec<f64> = cross(&[vec![1.0, 0.0]], 2);
        assert_eq!(n, vec![0.0, 1.0]);
    }
}
