//! GMRES with full orthogonalization (no restarts), modified Gram-Schmidt and
//! Givens rotations on the Hessenberg factor.

use nalgebra::DVector;

use crate::{Error, Result};

/// Solution of a GMRES run together with its convergence record.
#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: DVector<f64>,
    pub iterations: usize,
    /// Final relative residual ||b - Ax|| / ||b||.
    pub residual: f64,
}

/// Solves `apply(x) = rhs` to relative residual `tol` within `maxit`
/// iterations. The Krylov basis is kept in full, so `maxit` iterations always
/// suffice in exact arithmetic for a system of that dimension.
pub fn gmres<F>(mut apply: F, rhs: &DVector<f64>, tol: f64, maxit: usize) -> Result<GmresResult>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let n = rhs.len();
    let bnorm = rhs.norm();
    if bnorm == 0.0 {
        return Ok(GmresResult { x: DVector::zeros(n), iterations: 0, residual: 0.0 });
    }
    let maxit = maxit.min(n);

    let mut basis: Vec<DVector<f64>> = vec![rhs / bnorm];
    // upper-triangular R of the rotated Hessenberg, stored by columns
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<(f64, f64)> = Vec::new();
    let mut g = vec![bnorm]; // rotated rhs of the least-squares problem
    let mut residual = 1.0;
    let mut iterations = 0;

    for j in 0..maxit {
        let mut w = apply(&basis[j]);
        let mut h = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            h[i] = w.dot(v);
            w.axpy(-h[i], v, 1.0);
        }
        let hnext = w.norm();
        h[j + 1] = hnext;

        // apply the accumulated rotations to the new column
        for (i, &(c, s)) in cs.iter().enumerate() {
            let tmp = c * h[i] + s * h[i + 1];
            h[i + 1] = -s * h[i] + c * h[i + 1];
            h[i] = tmp;
        }
        // new rotation annihilating h[j+1]
        let denom = (h[j] * h[j] + h[j + 1] * h[j + 1]).sqrt();
        let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (h[j] / denom, h[j + 1] / denom) };
        h[j] = denom;
        cs.push((c, s));
        g.push(-s * g[j]);
        g[j] *= c;

        r_cols.push(h[..=j].to_vec());
        iterations = j + 1;
        residual = g[j + 1].abs() / bnorm;
        if residual <= tol {
            break;
        }
        if basis.len() == maxit || hnext <= 1e-300 {
            break; // breakdown: solution already in the span
        }
        basis.push(w / hnext);
    }

    // back substitution
    let k = iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for l in i + 1..k {
            acc -= r_cols[l][i] * y[l];
        }
        y[i] = acc / r_cols[i][i];
    }
    let mut x = DVector::zeros(n);
    for (i, &yi) in y.iter().enumerate() {
        x.axpy(yi, &basis[i], 1.0);
    }

    if residual > tol {
        return Err(Error::GmresNonConvergence { residual, iterations });
    }
    Ok(GmresResult { x, iterations, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_converges_in_one_iteration() {
        let rhs = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let out = gmres(|v| v.clone(), &rhs, 1e-14, 10).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((out.x - rhs).norm() < 1e-13);
    }

    #[test]
    fn diagonal_two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let rhs = DVector::from_vec(vec![2.0, 3.0]);
        let out = gmres(|v| &a * v, &rhs, 1e-14, 10).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-12 && (out.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_diagonally_dominant_matches_dense_solve() {
        let n = 50;
        let mut rng = StdRng::seed_from_u64(42);
        let mut a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        for i in 0..n {
            a[(i, i)] += n as f64;
        }
        let rhs = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let direct = a.clone().lu().solve(&rhs).unwrap();
        let out = gmres(|v| &a * v, &rhs, 1e-13, n).unwrap();
        assert!((out.x - direct).norm() < 1e-10);
    }

    #[test]
    fn maxit_exceeded_is_an_error() {
        let n = 30;
        let mut rng = StdRng::seed_from_u64(7);
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j { 1.0 + i as f64 } else { rng.gen_range(-0.3..0.3) }
        });
        let rhs = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let err = gmres(|v| &a * v, &rhs, 1e-15, 2).unwrap_err();
        match err {
            crate::Error::GmresNonConvergence { iterations, .. } => assert_eq!(iterations, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let rhs = DVector::zeros(5);
        let out = gmres(|v| v.clone(), &rhs, 1e-14, 5).unwrap();
        assert_eq!(out.x, DVector::zeros(5));
    }
}
