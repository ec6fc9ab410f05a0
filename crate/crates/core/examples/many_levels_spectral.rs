//! Ladders with more than five levels go through the tridiagonal
//! eigensolver. Equal couplings give eigenvalues 2g cos(kπ/(n+1)).

use std::f64::consts::PI;

use rabi_ladder::evolution::{linear_grid, time_series, PropagatorOptions};
use rabi_ladder::model::{coupling_matrix, CouplingVector, LadderModel};
use rabi_ladder::spectral::tridiag_eigen;

fn main() -> rabi_ladder::Result<()> {
    let n = 8;
    let g = CouplingVector::new(vec![1.0; n - 1])?;
    let dec = tridiag_eigen(&coupling_matrix(&g))?;
    for (k, l) in dec.eigenvalues.iter().enumerate() {
        let exact = 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
        println!("λ{} = {l:>14.10}  (2cos: {exact:>14.10})", k + 1);
    }

    // Anharmonic ladder: gaps shrink going up.
    let energies: Vec<f64> = (0..n).map(|k| k as f64 - 0.03 * (k * k) as f64).collect();
    let model = LadderModel::resonant(energies, vec![0.0; n - 1], g)?;
    let series = time_series(
        &model,
        &linear_grid(0.0, 12.0, 7),
        0,
        &PropagatorOptions::default(),
        false,
    )?;
    println!("kernel: {}", series.kernel);
    for (t, p) in series.times.iter().zip(&series.populations) {
        let row: Vec<String> = p.iter().map(|x| format!("{x:.3}")).collect();
        println!("t = {t:>5.1}: {}", row.join(" "));
    }
    Ok(())
}
