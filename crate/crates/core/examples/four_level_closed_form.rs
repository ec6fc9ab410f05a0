//! Closed-form propagator of a four-level ladder checked against a
//! scaling-and-squaring series exponential.

use rabi_ladder::closed_form::{expc4, spectrum4};
use rabi_ladder::model::{coupling_matrix, CouplingVector};
use rabi_ladder::spectral::expm_series;

fn main() -> rabi_ladder::Result<()> {
    let g = CouplingVector::new(vec![1.0, 2.0, 3.0])?;
    let s = spectrum4(&g)?;
    println!("A = {}  B = {}", s.a, s.b);
    println!("eigenvalues: {:?}", s.eigenvalues());
    println!("normalizers: X = {:.12}  Y = {:.12}", s.x, s.y);

    let c = coupling_matrix(&g).to_dense();
    for t in [0.1, 0.7, 3.0, 15.0] {
        let u = expc4(&g, t)?;
        println!(
            "t = {t:>5}: |closed - series| = {:.2e}, unitarity defect = {:.2e}, P(0→3) = {:.6}",
            u.max_abs_diff(&expm_series(&c, t)),
            u.unitarity_defect(),
            u[(3, 0)].norm_sqr()
        );
    }
    Ok(())
}
