//! Central-difference residual of i dU/dt = H(t) U for the lab-frame
//! propagator. Halving the step divides the residual by about four.

use rabi_ladder::evolution::{schrodinger_residual, PropagatorOptions};
use rabi_ladder::model::{build_hamiltonian, CouplingVector, LadderModel};

fn main() -> rabi_ladder::Result<()> {
    let model = LadderModel::resonant(
        vec![-0.5, 0.7, 1.6, 2.2, 2.5],
        vec![0.3, -2.0, 1.1, 0.6],
        CouplingVector::new(vec![0.8, 1.4, 0.5, 1.9])?,
    )?;
    let t = 2.3;
    let opts = PropagatorOptions::default();
    let scale = build_hamiltonian(&model, t).max_abs();
    let mut previous: Option<f64> = None;
    for h in [1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let r = schrodinger_residual(&model, t, h, &opts)?;
        let ratio = previous
            .map(|p| format!("{:.3}", p / r))
            .unwrap_or_else(|| "-".into());
        println!(
            "h = {h:<8} residual/‖H‖ = {:.3e}  ratio = {ratio}",
            r / scale
        );
        previous = Some(r);
    }
    Ok(())
}
