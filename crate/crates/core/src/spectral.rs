//! Numeric exponentials of the coupling matrix for any number of levels.
//!
//! Two deliberately unrelated routes live here:
//!
//! * [`expm_spectral`] diagonalizes the symmetric tridiagonal matrix with
//!   implicit-shift QL iteration and exponentiates the eigenvalues;
//! * [`expm_series`] works on an arbitrary dense complex matrix with a
//!   scaled Taylor series followed by repeated squaring.
//!
//! Neither shares code with the other or with the closed forms, so any of the
//! three can serve as a check on the other two.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, RealMatrix};
use crate::model::SymmetricTridiagonal;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS: usize = 30;

/// Target 1-norm of the scaled exponent in [`expm_series`].
const SERIES_SCALE_TARGET: f64 = 0.5;
/// Relative size of the first neglected Taylor term.
const SERIES_TRUNCATION: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 200;

/// Eigenvalues (descending) and the orthogonal matrix of eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the unit eigenvector for `eigenvalues[j]`.
    pub eigenvectors: RealMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `W diag(e^{-itλ}) Wᵀ`.
    pub fn exp_minus_i(&self, t: f64) -> ComplexMatrix {
        let n = self.dim();
        let w = &self.eigenvectors;
        let phases: Vec<C64> = self
            .eigenvalues
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t))
            .collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| phases[k] * (w[(i, k)] * w[(j, k)])).sum()
        })
    }

    /// `max |C W - W diag(λ)|` against the matrix that was decomposed.
    pub fn residual(&self, c: &SymmetricTridiagonal) -> f64 {
        let cw = c.to_real().matmul(&self.eigenvectors);
        let mut wl = self.eigenvectors.clone();
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                wl[(i, j)] *= self.eigenvalues[j];
            }
        }
        cw.max_abs_diff(&wl)
    }
}

/// Eigendecomposition of a symmetric tridiagonal matrix by implicit QL.
///
/// Eigenvalues come back in descending order. Each eigenvector is signed so
/// that its first entry of non-negligible magnitude is positive. Within a
/// cluster of (numerically) equal eigenvalues the vectors are
/// re-orthonormalized, since only the spanned subspace is meaningful there.
pub fn tridiag_eigen(c: &SymmetricTridiagonal) -> Result<SpectralDecomposition> {
    let n = c.dim();
    let mut d = c.diagonal().to_vec();
    let mut e = c.off_diagonal().to_vec();
    e.push(0.0);
    let mut v = RealMatrix::identity(n);

    let eps = f64::EPSILON;
    let mut shift_acc = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(Error::ConvergenceFailure {
                        index: l,
                        sweeps: MAX_SWEEPS,
                    });
                }
                // Wilkinson-style shift from the leading 2x2 block.
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                shift_acc += h;

                // Implicit QL transformation.
                p = d[m];
                let (mut cs, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = cs;
                    s2 = s;
                    let g = cs * e[i];
                    h = cs * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    cs = p / r;
                    p = cs * d[i] - s * g;
                    d[i + 1] = h + s * (cs * g + s * d[i]);
                    for k in 0..n {
                        let h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + cs * h;
                        v[(k, i)] = cs * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = cs * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift_acc;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut columns: Vec<Vec<f64>> = order.iter().map(|&k| v.column(k)).collect();

    let scale = eigenvalues.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    reorthonormalize_clusters(&eigenvalues, &mut columns, 1e-10 * scale);
    for col in &mut columns {
        fix_sign(col);
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: RealMatrix::from_columns(&columns),
    })
}

/// Modified Gram-Schmidt within runs of eigenvalues closer than `tol`.
fn reorthonormalize_clusters(eigenvalues: &[f64], columns: &mut [Vec<f64>], tol: f64) {
    let mut start = 0;
    while start < eigenvalues.len() {
        let mut end = start + 1;
        while end < eigenvalues.len() && (eigenvalues[end - 1] - eigenvalues[end]).abs() <= tol {
            end += 1;
        }
        if end - start > 1 {
            for j in start..end {
                for k in start..j {
                    let dot: f64 = columns[j].iter().zip(&columns[k]).map(|(a, b)| a * b).sum();
                    let (head, tail) = columns.split_at_mut(j);
                    for (x, y) in tail[0].iter_mut().zip(&head[k]) {
                        *x -= dot * y;
                    }
                }
                let norm = columns[j].iter().map(|x| x * x).sum::<f64>().sqrt();
                for x in &mut columns[j] {
                    *x /= norm;
                }
            }
        }
        start = end;
    }
}

fn fix_sign(col: &mut [f64]) {
    if let Some(&lead) = col.iter().find(|x| x.abs() > 1e-12) {
        if lead < 0.0 {
            for x in col.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// `exp(-itC)` through the eigendecomposition of `C`.
pub fn expm_spectral(c: &SymmetricTridiagonal, t: f64) -> Result<ComplexMatrix> {
    Ok(tridiag_eigen(c)?.exp_minus_i(t))
}

/// `exp(-itM)` by scaling and squaring a truncated Taylor series.
///
/// The exponent is halved `s` times until its 1-norm is at most 0.5, the
/// series is summed until the next term is negligible relative to the
/// partial sum, and the result is squared `s` times.
pub fn expm_series(m: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = m.dim();
    let a = m.scale(C64::new(0.0, -t));
    let norm = a.norm1();
    let mut squarings = 0u32;
    if norm > SERIES_SCALE_TARGET {
        squarings = (norm / SERIES_SCALE_TARGET).log2().ceil() as u32;
        while norm / 2f64.powi(squarings as i32) > SERIES_SCALE_TARGET {
            squarings += 1;
        }
    }
    let a = a.scale(C64::new(2f64.powi(-(squarings as i32)), 0.0));

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=SERIES_MAX_TERMS {
        term = (&term * &a).scale(C64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
        if term.norm1() <= SERIES_TRUNCATION * sum.norm1() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{coupling_matrix, CouplingVector};
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn cm(g: &[f64]) -> SymmetricTridiagonal {
        coupling_matrix(&CouplingVector::new(g.to_vec()).unwrap())
    }

    #[test]
    fn two_by_two() {
        let dec = tridiag_eigen(&cm(&[1.0])).unwrap();
        assert!((dec.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((dec.eigenvalues[1] + 1.0).abs() < 1e-15);
        let expect = RealMatrix::from_columns(&[
            vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        ]);
        assert!(dec.eigenvectors.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn equal_couplings_five_levels() {
        let dec = tridiag_eigen(&cm(&[1.0; 4])).unwrap();
        let expect = [3f64.sqrt(), 1.0, 0.0, -1.0, -(3f64.sqrt())];
        for (a, b) in dec.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert!(dec.eigenvectors.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let dec = tridiag_eigen(&cm(&[0.0; 3])).unwrap();
        assert_eq!(dec.eigenvalues, vec![0.0; 4]);
        assert_eq!(dec.eigenvectors, RealMatrix::identity(4));
    }

    #[test]
    fn nonzero_diagonal() {
        let c = SymmetricTridiagonal::new(vec![2.0, -1.0, 0.5], vec![0.3, 1.1]).unwrap();
        let dec = tridiag_eigen(&c).unwrap();
        assert!(dec.residual(&c) < 1e-13);
        let trace: f64 = dec.eigenvalues.iter().sum();
        assert!((trace - 1.5).abs() < 1e-13);
    }

    #[test]
    fn degenerate_cluster_is_orthonormal() {
        // g2 = 0 with g1 = g3 splits into two identical 2x2 blocks.
        let c = cm(&[1.0, 0.0, 1.0]);
        let dec = tridiag_eigen(&c).unwrap();
        assert!(dec.eigenvectors.orthogonality_defect() < 1e-14);
        assert!(dec.residual(&c) < 1e-14);
    }

    #[test]
    fn spectral_three_level_transfer() {
        let u = expm_spectral(&cm(&[1.0, 1.0]), PI / SQRT_2).unwrap();
        let mut expect = ComplexMatrix::zeros(3);
        expect[(0, 2)] = C64::new(-1.0, 0.0);
        expect[(1, 1)] = C64::new(-1.0, 0.0);
        expect[(2, 0)] = C64::new(-1.0, 0.0);
        assert!(u.max_abs_diff(&expect) < 1e-12);
        assert!(
            expm_spectral(&cm(&[1.0, 1.0]), 0.0)
                .unwrap()
                .max_abs_diff(&ComplexMatrix::identity(3))
                < 1e-15
        );
    }

    #[test]
    fn seven_levels_equal_coupling() {
        let c = cm(&[1.0; 6]);
        let dec = tridiag_eigen(&c).unwrap();
        for (k, l) in dec.eigenvalues.iter().enumerate() {
            let expect = 2.0 * ((k + 1) as f64 * PI / 8.0).cos();
            assert!((l - expect).abs() < 1e-11);
        }
        let u = dec.exp_minus_i(1.0);
        assert!(u.unitarity_defect() < 1e-11);
    }

    #[test]
    fn series_simple_cases() {
        assert_eq!(
            expm_series(&ComplexMatrix::zeros(3), 5.0),
            ComplexMatrix::identity(3)
        );
        let x = cm(&[1.0]).to_dense();
        let u = expm_series(&x, PI / 2.0);
        let expect = ComplexMatrix::from_row_major(
            2,
            vec![
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert!(u.max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn series_and_spectral_agree() {
        let c = cm(&[1.0, 2.0, 3.0]);
        let a = expm_series(&c.to_dense(), 0.7);
        let b = expm_spectral(&c, 0.7).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-11);
    }

    #[test]
    fn deterministic() {
        let c = cm(&[0.3, 2.2, 1.7, 4.1, 0.9]);
        assert_eq!(tridiag_eigen(&c).unwrap(), tridiag_eigen(&c).unwrap());
    }
}
