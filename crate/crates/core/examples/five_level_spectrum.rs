//! Spectrum of the five-level coupling matrix: ±λ, ±λ₂ and an exact zero,
//! compared with the tridiagonal eigensolver.

use rabi_ladder::closed_form::spectrum5;
use rabi_ladder::model::{coupling_matrix, CouplingVector};
use rabi_ladder::spectral::tridiag_eigen;

fn main() -> rabi_ladder::Result<()> {
    for couplings in [
        vec![1.0; 4],
        vec![1.0, 2.0, 3.0, 4.0],
        vec![0.3, 5.0, 0.2, 2.5],
    ] {
        let g = CouplingVector::new(couplings)?;
        let closed = spectrum5(&g)?;
        let numeric = tridiag_eigen(&coupling_matrix(&g))?;
        println!("g = {:?}", g.as_slice());
        println!(
            "  λ = {:.12}  λ₂ = {:.12}  λ·λ₂ = {:.12}  √B = {:.12}",
            closed.lambda,
            closed.lambda2,
            closed.lambda * closed.lambda2,
            closed.b.sqrt()
        );
        for (a, b) in closed.eigenvalues().iter().zip(&numeric.eigenvalues) {
            println!("  {a:>16.12}  {b:>16.12}  Δ = {:.1e}", (a - b).abs());
        }
        let ortho = closed.eigenvectors().orthogonality_defect();
        println!("  eigenvector orthonormality defect: {ortho:.1e}");
    }
    Ok(())
}
