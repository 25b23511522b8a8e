//! Small numerical helpers shared by unit tests.

use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::fmath::*;

/// Eigenvalues of a dense real symmetric matrix by the cyclic Jacobi
/// method. `a` holds the matrix row-major and is destroyed; returns the
/// eigenvalues in ascending order. Intended for the small matrices that
/// appear in positivity checks — O(n³) per sweep is perfectly fine there.
pub(crate) fn symmetric_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    for sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-28 * (1.0 + frobenius(a)) || n < 2 {
            break;
        }
        assert!(sweep < 63, "Jacobi iteration failed to converge");
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    eigs
}

fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// Cholesky factorization of a dense symmetric matrix (row-major). Returns
/// the smallest diagonal pivot of the factor when the matrix is positive
/// definite and `None` as soon as a pivot fails — an O(n³) definiteness
/// check that scales to the few-hundred-node matrices the eigensolver
/// above is too slow for.
pub(crate) fn cholesky_min_pivot(a: &[f64], n: usize) -> Option<f64> {
    assert_eq!(a.len(), n * n);
    let mut l = alloc::vec![0.0f64; n * n];
    let mut min_pivot = f64::INFINITY;
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                let pivot = sum.sqrt();
                min_pivot = min_pivot.min(pivot);
                l[i * n + i] = pivot;
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(min_pivot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_matrix() {
        let mut a = alloc::vec![3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        let eigs = symmetric_eigenvalues(&mut a, 3);
        assert_eq!(eigs, alloc::vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_known_eigenvalues() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let mut a = alloc::vec![2.0, 1.0, 1.0, 2.0];
        let eigs = symmetric_eigenvalues(&mut a, 2);
        assert_relative_eq!(eigs[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(eigs[1], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn hilbert_matrix_positive() {
        // 5×5 Hilbert matrix: positive definite with known smallest
        // eigenvalue ≈ 3.2879e−6.
        let n = 5;
        let mut a = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 1.0 / (i + j + 1) as f64;
            }
        }
        let eigs = symmetric_eigenvalues(&mut a, n);
        assert!(eigs[0] > 0.0);
        assert_relative_eq!(eigs[0], 3.287928772171871e-6, max_relative = 1e-9);
        assert_relative_eq!(eigs[n - 1], 1.5670506910982311, max_relative = 1e-12);
    }

    #[test]
    fn cholesky_accepts_hilbert_and_rejects_indefinite() {
        let n = 5;
        let mut a = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 1.0 / (i + j + 1) as f64;
            }
        }
        let pivot = cholesky_min_pivot(&a, n).expect("Hilbert matrix is SPD");
        assert!(pivot > 0.0 && pivot < 1.0);
        // Flip one diagonal entry: no longer positive definite.
        a[2 * n + 2] = -1.0;
        assert_eq!(cholesky_min_pivot(&a, n), None);
    }
}
