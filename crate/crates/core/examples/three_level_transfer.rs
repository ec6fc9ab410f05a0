//! Full population transfer |0⟩ → |2⟩ in a resonantly driven three-level ladder.
//!
//! With equal couplings g the transfer completes at t = π / (g √2).

use std::f64::consts::{PI, SQRT_2};

use rabi_ladder::evolution::{linear_grid, time_series, PropagatorOptions};
use rabi_ladder::model::{CouplingVector, LadderModel};

fn main() -> rabi_ladder::Result<()> {
    let g = 1.0;
    let model = LadderModel::resonant(
        vec![0.0, 1.0, 1.8],
        vec![0.4, -1.1],
        CouplingVector::new(vec![g, g])?,
    )?;
    let t_transfer = PI / (g * SQRT_2);

    let grid = linear_grid(0.0, t_transfer, 9);
    let series = time_series(&model, &grid, 0, &PropagatorOptions::default(), false)?;
    println!("kernel: {}", series.kernel);
    println!("{:>8}  {:>8}  {:>8}  {:>8}", "t", "P0", "P1", "P2");
    for (t, p) in series.times.iter().zip(&series.populations) {
        println!("{t:>8.4}  {:>8.5}  {:>8.5}  {:>8.5}", p[0], p[1], p[2]);
    }
    Ok(())
}
