//! Least right singular vectors of the constraint matrix.
//!
//! Small systems use a dense SVD of `A`. Larger ones run LOBPCG on
//! `AᵀA` (applied matrix-free through `A`) with a Jacobi preconditioner,
//! and fall back to the dense SVD when the iteration stalls.

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Which decomposition produced a [`Spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    DenseSvd,
    Lobpcg,
    /// LOBPCG did not converge; the dense SVD answered instead.
    DenseFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Column count above which the sparse iteration is used.
    pub dense_threshold: usize,
    /// Residual tolerance `‖AᵀA x − θ x‖ ≤ tol · σ_max²`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 200,
            tolerance: 1e-13,
            max_iterations: 3000,
        }
    }
}

/// The two smallest singular values with right singular vectors, and the
/// largest singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Scalar> {
    pub sigma_min: T,
    pub sigma_second: T,
    pub sigma_max: T,
    /// Unit right singular vector of `sigma_min`.
    pub null_vector: DVector<T>,
    pub method: EigenMethod,
    pub iterations: usize,
}

pub fn smallest_singular_pairs<T: Scalar>(a: &CsrMatrix<T>, opts: &EigenOptions) -> Result<Spectrum<T>> {
    let m = a.ncols();
    if m < 2 {
        return Err(Error::TooFewUnknowns { need: 2, got: m });
    }
    if m <= opts.dense_threshold {
        return dense_spectrum(&a.to_dense(), EigenMethod::DenseSvd);
    }
    match lobpcg(a, opts) {
        Some(s) => Ok(s),
        None => {
            log::warn!("LOBPCG did not converge on a {}x{} system; using dense SVD", a.nrows(), m);
            dense_spectrum(&a.to_dense(), EigenMethod::DenseFallback)
        }
    }
}

/// Dense SVD route. Rows are zero-padded up to the column count so that a
/// full set of right singular vectors is always available.
pub fn dense_spectrum<T: Scalar>(a: &DMatrix<T>, method: EigenMethod) -> Result<Spectrum<T>> {
    let m = a.ncols();
    if m < 2 {
        return Err(Error::TooFewUnknowns { need: 2, got: m });
    }
    let padded;
    let a = if a.nrows() < m {
        padded = a.clone().resize_vertically(m, T::zero());
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Degenerate("SVD returned no right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let s = &svd.singular_values;
    Ok(Spectrum {
        sigma_min: s[order[0]],
        sigma_second: s[order[1]],
        sigma_max: s[*order.last().expect("m >= 2")],
        null_vector: v_t.row(order[0]).transpose(),
        method,
        iterations: 0,
    })
}

fn random_block<T: Scalar>(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        T::lit(z)
    })
}

/// Largest eigenvalue of `AᵀA` from a fully reorthogonalized Lanczos run.
fn largest_gram_eigenvalue<T: Scalar>(a: &CsrMatrix<T>, rng: &mut ChaCha8Rng) -> T {
    let m = a.ncols();
    let steps = m.min(80);
    let mut v = random_block::<T>(m, 1, rng).column(0).into_owned();
    v /= v.norm();
    let mut basis: Vec<DVector<T>> = vec![v];
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<T> = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut w = a.tr_mul_vec(&a.mul_vec(&basis[k]));
        alpha.push(basis[k].dot(&w));
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&w);
                w.axpy(-d, q, T::one());
            }
        }
        let b = w.norm();
        if k + 1 == steps || b <= alpha[0].abs().max(T::one()) * T::tolerance(1e-14, 10.0) {
            break;
        }
        beta.push(b);
        basis.push(w / b);
    }
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t.symmetric_eigen().eigenvalues.iter().copied().fold(T::zero(), |acc, x| if x > acc { x } else { acc })
}

/// Modified Gram-Schmidt, twice, dropping columns that collapse.
fn orthonormalize<T: Scalar>(s: &DMatrix<T>) -> DMatrix<T> {
    let mut cols: Vec<DVector<T>> = Vec::with_capacity(s.ncols());
    for k in 0..s.ncols() {
        let mut v = s.column(k).into_owned();
        let before = v.norm();
        if before == T::zero() {
            continue;
        }
        for _ in 0..2 {
            for q in &cols {
                let d = q.dot(&v);
                v.axpy(-d, q, T::one());
            }
        }
        let after = v.norm();
        if after > before * T::tolerance(1e-10, 1e4) {
            cols.push(v / after);
        }
    }
    DMatrix::from_columns(&cols)
}

fn sorted_eigen<T: Scalar>(h: DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let h = (&h + h.transpose()) * T::lit(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Block LOBPCG for the two smallest eigenpairs of `AᵀA` (one guard vector).
fn lobpcg<T: Scalar>(a: &CsrMatrix<T>, opts: &EigenOptions) -> Option<Spectrum<T>> {
    let m = a.ncols();
    let wanted = 2;
    let block = 3.min(m);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let lambda_max = largest_gram_eigenvalue(a, &mut rng);
    if !(lambda_max > T::zero()) {
        return None;
    }
    let tol = T::lit(opts.tolerance) * lambda_max;
    let inv_diag = a
        .gram_diagonal()
        .map(|d| if d > T::zero() { T::one() / d } else { T::one() });

    let mut x = orthonormalize(&random_block::<T>(m, block, &mut rng));
    if x.ncols() < block {
        return None;
    }
    let (theta, c) = sorted_eigen(x.transpose() * a.gram_mul(&x));
    x = &x * c;
    let mut ax = a.gram_mul(&x);
    let mut theta = theta;
    let mut p: Option<DMatrix<T>> = None;

    for it in 0..opts.max_iterations {
        let mut r = &ax - &x * DMatrix::from_diagonal(&DVector::from_vec(theta.clone()));
        let converged = (0..wanted).all(|k| r.column(k).norm() <= tol);
        if converged {
            let sigma = |k: usize| {
                let col = x.column(k).into_owned();
                a.mul_vec(&col).norm()
            };
            let mut v = x.column(0).into_owned();
            v /= v.norm();
            return Some(Spectrum {
                sigma_min: sigma(0),
                sigma_second: sigma(1),
                sigma_max: lambda_max.sqrt(),
                null_vector: v,
                method: EigenMethod::Lobpcg,
                iterations: it,
            });
        }
        for (i, mut row) in r.row_iter_mut().enumerate() {
            row *= inv_diag[i];
        }
        let mut parts = vec![x.clone(), r];
        if let Some(p) = &p {
            parts.push(p.clone());
        }
        let s = DMatrix::from_columns(
            &parts
                .iter()
                .flat_map(|b| b.column_iter().map(|c| c.into_owned()))
                .collect::<Vec<_>>(),
        );
        let q = orthonormalize(&s);
        if q.ncols() < block {
            return None;
        }
        let aq = a.gram_mul(&q);
        let (values, vecs) = sorted_eigen(q.transpose() * &aq);
        let y = vecs.columns(0, block).into_owned();
        let x_new = &q * &y;
        let ax_new = &aq * &y;
        let extra = q.ncols() - block;
        p = (extra > 0).then(|| q.columns(block, extra) * y.rows(block, extra));
        x = x_new;
        ax = ax_new;
        theta = values[..block].to_vec();
        if !theta.iter().all(|t| t.is_finite()) {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_sparse(rows: usize, cols: usize, per_row: usize, seed: u64) -> CsrMatrix<f64> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..rows)
            .map(|_| {
                let mut cs: Vec<usize> = (0..per_row).map(|_| rng.random_range(0..cols)).collect();
                cs.sort_unstable();
                cs.dedup();
                cs.into_iter().map(|c| (c, rng.random_range(-1.0..1.0))).collect()
            })
            .collect();
        CsrMatrix::from_rows(cols, rows)
    }

    #[test]
    fn dense_handles_wide_matrices() {
        // One row, three unknowns: two-dimensional null space.
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let s = dense_spectrum(&a, EigenMethod::DenseSvd).unwrap();
        assert!(s.sigma_min < 1e-14 && s.sigma_second < 1e-14);
        assert_relative_eq!(s.sigma_max, 2f64.sqrt(), epsilon = 1e-14);
        assert!((&a * &s.null_vector).norm() < 1e-14);
    }

    #[test]
    fn lobpcg_agrees_with_dense_svd() {
        let a = random_sparse(900, 300, 6, 3);
        let opts = EigenOptions {
            dense_threshold: 0,
            ..EigenOptions::default()
        };
        let sparse = smallest_singular_pairs(&a, &opts).unwrap();
        assert_eq!(sparse.method, EigenMethod::Lobpcg);
        let dense = dense_spectrum(&a.to_dense(), EigenMethod::DenseSvd).unwrap();
        assert_relative_eq!(sparse.sigma_min, dense.sigma_min, max_relative = 1e-6);
        assert_relative_eq!(sparse.sigma_second, dense.sigma_second, max_relative = 1e-6);
        assert_relative_eq!(sparse.sigma_max, dense.sigma_max, max_relative = 1e-6);
        let align = sparse.null_vector.dot(&dense.null_vector).abs();
        assert!(1.0 - align < 1e-8, "alignment {align}");
    }

    #[test]
    fn stalled_iteration_falls_back_to_dense() {
        let a = random_sparse(600, 250, 5, 4);
        let opts = EigenOptions {
            dense_threshold: 0,
            max_iterations: 1,
            tolerance: 1e-30,
        };
        let s = smallest_singular_pairs(&a, &opts).unwrap();
        assert_eq!(s.method, EigenMethod::DenseFallback);
    }

    #[test]
    fn too_few_unknowns() {
        let a = CsrMatrix::<f64>::from_rows(1, vec![vec![(0, 1.0)]]);
        assert!(matches!(
            smallest_singular_pairs(&a, &EigenOptions::default()),
            Err(Error::TooFewUnknowns { .. })
        ));
    }
}
