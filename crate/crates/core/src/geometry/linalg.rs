//! Dense linear algebra for small matrices (ambient dimensions are single
//! digits here, so everything is plain row-major `Vec<f64>` with O(n³) loops).

/// Row-major square matrix times vector.
pub fn matvec(mat: &[f64], n: usize, v: &[f64], out: &mut [f64]) {
    debug_assert_eq!(mat.len(), n * n);
    debug_assert_eq!(v.len(), n);
    for i in 0..n {
        let row = &mat[i * n..(i + 1) * n];
        out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
}

/// Transpose of a row-major square matrix times vector.
pub fn matvec_t(mat: &[f64], n: usize, v: &[f64], out: &mut [f64]) {
    debug_assert_eq!(mat.len(), n * n);
    for x in out.iter_mut() {
        *x = 0.0;
    }
    for i in 0..n {
        let row = &mat[i * n..(i + 1) * n];
        for j in 0..n {
            out[j] += row[j] * v[i];
        }
    }
}

/// Determinant via LU with partial pivoting. The input is copied.
pub fn determinant(mat: &[f64], n: usize) -> f64 {
    let mut a = mat.to_vec();
    let mut det = 1.0_f64;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
        }
    }
    det
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the pivot falls below `1e-13` times the largest entry,
/// which the callers treat as a degenerate subproblem.
pub fn solve(mat: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut a = mat.to_vec();
    let mut rhs = b.to_vec();
    let scale = a.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() <= 1e-13 * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            rhs.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for j in col + 1..n {
            acc -= a[col * n + j] * x[j];
        }
        x[col] = acc / a[col * n + col];
    }
    Some(x)
}

/// In-place QR orthonormalisation of the columns of a row-major matrix using
/// modified Gram–Schmidt with one re-orthogonalisation pass.
///
/// Returns the diagonal of R. Column `j` of the output spans the same flag as
/// column `j` of the input, which is what makes the Gaussian → QR → sign-fix
/// construction of Haar rotations work.
pub fn qr_orthonormalize(mat: &mut [f64], n: usize) -> Vec<f64> {
    let mut rdiag = vec![0.0; n];
    let col_dot = |m: &[f64], a: usize, b: usize| -> f64 {
        (0..n).map(|i| m[i * n + a] * m[i * n + b]).sum()
    };
    for j in 0..n {
        // Two MGS passes keep orthogonality at the 1e-15 level.
        for _pass in 0..2 {
            for prev in 0..j {
                let proj = col_dot(mat, prev, j);
                for i in 0..n {
                    mat[i * n + j] -= proj * mat[i * n + prev];
                }
            }
        }
        let norm = col_dot(mat, j, j).sqrt();
        rdiag[j] = norm;
        if norm > 0.0 {
            for i in 0..n {
                mat[i * n + j] /= norm;
            }
        }
    }
    rdiag
}

/// max_{ij} |QᵀQ − I|, the orthonormality defect.
pub fn orthonormality_defect(mat: &[f64], n: usize) -> f64 {
    let mut worst = 0.0_f64;
    for a in 0..n {
        for b in a..n {
            let dot: f64 = (0..n).map(|i| mat[i * n + a] * mat[i * n + b]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_solve_agree_with_hand_values() {
        let a = [2.0, 1.0, 1.0, 3.0];
        assert!((determinant(&a, 2) - 5.0).abs() < 1e-14);
        let x = solve(&a, 2, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14);
        assert!((x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn qr_produces_orthonormal_columns() {
        let mut m = vec![1.0, 2.0, 0.5, -1.0, 0.0, 3.0, 4.0, 1.0, 1.0];
        let r = qr_orthonormalize(&mut m, 3);
        assert!(orthonormality_defect(&m, 3) < 1e-14);
        assert!(r.iter().all(|x| *x > 0.0));
    }

    #[test]
    fn singular_solve_is_rejected() {
        let a = [1.0, 2.0, 2.0, 4.0];
        assert!(solve(&a, 2, &[1.0, 2.0]).is_none());
    }
}
