//! Small dense exact linear algebra helpers.

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

pub fn zeros<S: Scalar>(rows: usize, cols: usize) -> Matrix<S> {
    vec![vec![S::zero(); cols]; rows]
}

pub fn identity<S: Scalar>(n: usize) -> Matrix<S> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

/// The `len × total` matrix that picks coordinates `offset..offset+len`.
pub fn block_selector<S: Scalar>(offset: usize, len: usize, total: usize) -> Matrix<S> {
    let mut m = zeros(len, total);
    for i in 0..len {
        m[i][offset + i] = S::one();
    }
    m
}

/// The matrix picking the listed coordinates, in order.
pub fn selector<S: Scalar>(coords: &[usize], total: usize) -> Matrix<S> {
    let mut m = zeros(coords.len(), total);
    for (i, &c) in coords.iter().enumerate() {
        m[i][c] = S::one();
    }
    m
}

pub fn mat_vec<S: Scalar>(m: &[Vec<S>], v: &[S]) -> Vec<S> {
    m.iter().map(|row| crate::scalar::dot(row, v)).collect()
}

/// Row vector times matrix: `rowᵀ M`.
pub fn vec_mat<S: Scalar>(row: &[S], m: &[Vec<S>], cols: usize) -> Vec<S> {
    let mut out = vec![S::zero(); cols];
    for (r, mrow) in row.iter().zip(m) {
        if r.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(mrow) {
            if !x.is_zero() {
                *o = o.clone() + r.clone() * x;
            }
        }
    }
    out
}

pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>], cols: usize) -> Matrix<S> {
    a.iter().map(|row| vec_mat(row, b, cols)).collect()
}

pub fn transpose<S: Scalar>(m: &[Vec<S>], cols: usize) -> Matrix<S> {
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn neg_vec<S: Scalar>(v: &[S]) -> Vec<S> {
    v.iter().map(|x| -x.clone()).collect()
}

pub fn add_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y).collect()
}

pub fn sub_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y).collect()
}

pub fn scale_vec<S: Scalar>(v: &[S], s: &S) -> Vec<S> {
    v.iter().map(|x| x.clone() * s).collect()
}

/// Reduced row echelon form of the augmented rows `[m | rhs]`, in place.
/// Returns the pivot columns. Zero rows are removed.
pub fn rref<S: Scalar>(rows: &mut Matrix<S>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = S::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x = x.clone() * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = x.clone() - f.clone() * p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    pivots
}

pub fn rank<S: Scalar>(m: &[Vec<S>], cols: usize) -> usize {
    let mut rows = m.to_vec();
    rref(&mut rows, cols).len()
}

/// Basis of `{x : Mx = 0}`.
pub fn nullspace<S: Scalar>(m: &[Vec<S>], cols: usize) -> Matrix<S> {
    let mut rows = m.to_vec();
    let pivots = rref(&mut rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Symmetric positive semidefiniteness by exact symmetric elimination.
pub fn is_psd<S: Scalar>(q: &[Vec<S>]) -> bool {
    let n = q.len();
    let mut a = q.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    while let Some(pos) = active.iter().position(|&i| !a[i][i].is_zero()) {
        let k = active[pos];
        if a[k][k].is_negative() {
            return false;
        }
        active.remove(pos);
        let pivot = a[k][k].clone();
        let col: Vec<S> = (0..n).map(|i| a[i][k].clone()).collect();
        for &i in &active {
            for &j in &active {
                a[i][j] = a[i][j].clone() - col[i].clone() * &col[j] / &pivot;
            }
        }
    }
    // every remaining diagonal entry is zero, so the remaining block must vanish
    active.iter().all(|&i| active.iter().all(|&j| a[i][j].is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num::BigRational;

    fn m(rows: &[&[i64]]) -> Matrix<BigRational> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&a, 3), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&a, &ns[0]).iter().all(|x| *x == rat(0, 1)));
    }

    #[test]
    fn psd_detection() {
        assert!(is_psd(&m(&[&[2, 1], &[1, 1]])));
        assert!(is_psd(&m(&[&[1, 1], &[1, 1]])));
        assert!(!is_psd(&m(&[&[1, 2], &[2, 1]])));
        assert!(!is_psd(&m(&[&[0, 1], &[1, 0]])));
        assert!(is_psd(&m(&[&[0, 0], &[0, 3]])));
    }
}
