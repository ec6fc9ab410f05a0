//! Couplings at which the closed forms become singular. `Kernel::Auto`
//! switches to the spectral route; `Kernel::ClosedForm` refuses.

use rabi_ladder::evolution::{propagator, Evolver, Kernel, PropagatorOptions};
use rabi_ladder::model::{CouplingVector, LadderModel};

fn main() -> rabi_ladder::Result<()> {
    let cases = [
        (vec![0.0, 1.0, 1.8, 2.4], vec![1.0, 0.0, 1.0]),
        (vec![0.0, 1.0, 1.8, 2.4, 2.8], vec![0.0, 1.0, 1.0, 0.0]),
    ];
    for (energies, g) in cases {
        let phis = vec![0.0; g.len()];
        let model = LadderModel::resonant(energies, phis, CouplingVector::new(g)?)?;
        println!("g = {:?}", model.couplings().as_slice());

        match propagator(
            &model,
            1.0,
            &PropagatorOptions::with_kernel(Kernel::ClosedForm),
        ) {
            Ok(_) => println!("  closed form: accepted"),
            Err(e) => println!("  closed form: {e}"),
        }
        let auto = Evolver::new(&model, &PropagatorOptions::default())?;
        let u = auto.propagator(2.5);
        println!(
            "  auto kernel: {}, unitarity defect {:.1e}",
            auto.kernel_used(),
            u.unitarity_defect()
        );
    }
    Ok(())
}
