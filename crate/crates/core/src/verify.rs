//! Seeded property battery.
//!
//! Each battery draws random couplings, times and models from a ChaCha
//! stream, evaluates one family of invariants, and records the largest
//! defect seen together with the inputs that produced it. The same seed
//! always yields the same report, byte for byte.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{self, QuarticSpectrum4, QuinticSpectrum5};
use crate::error::{Error, Result};
use crate::evolution::{self, Evolver, Kernel, PropagatorOptions};
use crate::matrix::ComplexMatrix;
use crate::model::{
    build_hamiltonian, coupling_matrix, rotating_frame, CouplingVector, LadderModel,
};
use crate::spectral::{self, expm_series};

/// Tolerances for every property the battery checks.
pub mod tol {
    pub const CLOSED_UNITARITY: f64 = 1e-11;
    pub const CLOSED_VS_SERIES: f64 = 1e-10;
    pub const GROUP_LAW: f64 = 1e-10;
    pub const DETERMINANT: f64 = 1e-10;
    /// Relative to `A²`.
    pub const CHARACTERISTIC: f64 = 1e-10;
    pub const PRODUCT_IDENTITY: f64 = 1e-12;
    pub const EIGENVECTOR_ORTHONORMALITY: f64 = 1e-10;
    pub const SPECTRAL_SYMMETRY: f64 = 1e-11;
    pub const SPECTRAL_VS_SERIES: f64 = 1e-10;
    pub const ORACLE_UNITARITY: f64 = 1e-11;
    pub const EIGEN_ORTHOGONALITY: f64 = 1e-12;
    /// Relative to `max(1, max|λ|)`.
    pub const EIGEN_RESIDUAL: f64 = 1e-11;
    pub const PROPAGATOR_UNITARITY: f64 = 1e-10;
    pub const KERNEL_INDEPENDENCE: f64 = 1e-9;
    pub const PHASE_INVARIANCE: f64 = 1e-12;
    pub const ENERGY_SHIFT: f64 = 1e-12;
    /// Relative to `max(1, ‖H‖_max)`.
    pub const HERMITICITY: f64 = 1e-14;
    pub const FACTORIZATION: f64 = 1e-12;
    pub const FRAME_UNITARITY: f64 = 1e-14;
    pub const RESIDUAL_RATIO_LO: f64 = 3.7;
    pub const RESIDUAL_RATIO_HI: f64 = 4.3;
    /// Relative to `‖H‖_max`, at step `RESIDUAL_STEP`.
    pub const RESIDUAL_ABS: f64 = 1e-7;
    pub const RESIDUAL_STEP: f64 = 1e-5;
    /// Largest tolerated fraction of closed-form draws rejected as degenerate.
    pub const DEGENERATE_RATE: f64 = 0.01;
}

/// Outcome of one property over all draws.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyResult {
    pub name: String,
    /// Upper bound the defect must respect (for two-sided checks, see `lower`).
    pub tolerance: f64,
    /// When set, the defect must also be at least this value.
    pub lower: Option<f64>,
    pub checked: usize,
    /// Largest defect, or for two-sided checks the value furthest outside
    /// (or closest to the edge of) the accepted interval.
    pub worst: f64,
    /// Inputs that produced `worst`.
    pub worst_case: String,
    /// Draws outside tolerance.
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl PropertyResult {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            tolerance,
            lower: None,
            checked: 0,
            worst: 0.0,
            worst_case: String::new(),
            failures: 0,
            first_failure: None,
        }
    }

    fn interval(name: &str, lower: f64, upper: f64) -> Self {
        Self {
            lower: Some(lower),
            worst: f64::NAN,
            ..Self::new(name, upper)
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, defect: f64, case: impl FnOnce() -> String) {
        self.checked += 1;
        let ok = match self.lower {
            None => defect <= self.tolerance,
            Some(lo) => (lo..=self.tolerance).contains(&defect),
        };
        let more_extreme = match self.lower {
            None => defect.is_nan() || defect > self.worst,
            Some(lo) => {
                let mid = 0.5 * (lo + self.tolerance);
                self.worst.is_nan()
                    || (defect - mid).abs() > (self.worst - mid).abs()
                    || defect.is_nan()
            }
        };
        if !ok || more_extreme {
            let case = case();
            if more_extreme {
                self.worst = defect;
                self.worst_case = case.clone();
            }
            if !ok {
                self.failures += 1;
                self.first_failure.get_or_insert(case);
            }
        }
    }

    fn record_failure(&mut self, case: String) {
        self.checked += 1;
        self.failures += 1;
        self.worst = f64::INFINITY;
        self.worst_case = case.clone();
        self.first_failure.get_or_insert(case);
    }
}

/// Collected results of one or more batteries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub draws: usize,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    /// Fixed-format text: one line per property, then failure details.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verify seed={} draws={}", self.seed, self.draws);
        for p in &self.properties {
            let bound = match p.lower {
                None => format!("<= {:.1e}", p.tolerance),
                Some(lo) => format!("in [{lo}, {}]", p.tolerance),
            };
            let _ = writeln!(
                s,
                "{:<6} {:<32} worst={:<12.4e} {:<22} n={}",
                if p.passed() { "PASS" } else { "FAIL" },
                p.name,
                p.worst,
                bound,
                p.checked
            );
        }
        for p in self.properties.iter().filter(|p| !p.passed()) {
            let _ = writeln!(
                s,
                "failed {}: {} of {} draws; first: {}",
                p.name,
                p.failures,
                p.checked,
                p.first_failure.as_deref().unwrap_or("?")
            );
        }
        s
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_couplings(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64) -> CouplingVector {
    CouplingVector::new((0..count).map(|_| rng.gen_range(lo..=hi)).collect())
        .expect("non-negative draw")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.17e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Random resonant, anharmonic ladder with `levels` levels.
pub fn random_model(rng: &mut ChaCha8Rng, levels: usize) -> LadderModel {
    let mut gaps: Vec<f64> = (0..levels - 1).map(|_| rng.gen_range(0.5..3.0)).collect();
    gaps.sort_by(|a, b| b.total_cmp(a));
    let mut energies = vec![rng.gen_range(-2.0..2.0)];
    for gap in &gaps {
        let last = *energies.last().unwrap();
        energies.push(last + gap);
    }
    let phis = (0..levels - 1).map(|_| rng.gen_range(-PI..PI)).collect();
    let g = draw_couplings(rng, levels - 1, 0.1, 3.0);
    LadderModel::resonant(energies, phis, g).expect("valid random model")
}

fn describe_model(m: &LadderModel) -> String {
    format!(
        "E={} phi={} g={}",
        fmt_vec(m.energies()),
        fmt_vec(m.phis()),
        fmt_vec(m.couplings().as_slice())
    )
}

enum Closed {
    Three(f64, f64),
    Four(QuarticSpectrum4),
    Five(QuinticSpectrum5),
}

impl Closed {
    fn exp(&self, t: f64) -> ComplexMatrix {
        match self {
            Closed::Three(a, b) => closed_form::expc3(*a, *b, t),
            Closed::Four(s) => s.exp_minus_i(t),
            Closed::Five(s) => s.exp_minus_i(t),
        }
    }
}

/// Closed forms for 3, 4 and 5 levels against the series oracle, plus
/// their algebraic invariants. `draws` counts draws per level count.
pub fn closed_form_battery(seed: u64, draws: usize) -> Vec<PropertyResult> {
    let mut rng = rng_for(seed, 1);
    let mut oracle = PropertyResult::new("closed_form_vs_series", tol::CLOSED_VS_SERIES);
    let mut unitarity = PropertyResult::new("closed_form_unitarity", tol::CLOSED_UNITARITY);
    let mut symmetric = PropertyResult::new("closed_form_complex_symmetry", 0.0);
    let mut group = PropertyResult::new("closed_form_group_law", tol::GROUP_LAW);
    let mut det = PropertyResult::new("closed_form_determinant", tol::DETERMINANT);
    let mut charpoly = PropertyResult::new("characteristic_residual", tol::CHARACTERISTIC);
    let mut product = PropertyResult::new("eigenvalue_product_identity", tol::PRODUCT_IDENTITY);
    let mut ortho = PropertyResult::new(
        "closed_eigenvector_orthonormality",
        tol::EIGENVECTOR_ORTHONORMALITY,
    );
    let mut sym = PropertyResult::new("closed_spectrum_symmetry", 0.0);
    let mut degenerate = PropertyResult::new("degenerate_rejection_rate", tol::DEGENERATE_RATE);
    let (mut rejected, mut attempted) = (0usize, 0usize);

    for draw in 0..draws {
        for levels in 3..=5 {
            let g = draw_couplings(&mut rng, levels - 1, 0.1, 10.0);
            let t = rng.gen_range(0.0..=20.0);
            let s1 = rng.gen_range(0.0..=5.0);
            let s2 = rng.gen_range(0.0..=5.0);
            let case = || {
                format!(
                    "seed={seed} draw={draw} n={levels} g={} t={t:.17e}",
                    fmt_vec(g.as_slice())
                )
            };
            attempted += 1;

            let closed = match levels {
                3 => Ok(Closed::Three(g.as_slice()[0], g.as_slice()[1])),
                4 => closed_form::spectrum4(&g).map(Closed::Four),
                _ => closed_form::spectrum5(&g).map(Closed::Five),
            };
            let closed = match closed {
                Ok(c) => c,
                Err(Error::DegenerateSpectrum(_)) => {
                    rejected += 1;
                    continue;
                }
                Err(e) => {
                    oracle.record_failure(format!("{}: {e}", case()));
                    continue;
                }
            };

            match &closed {
                Closed::Three(..) => {}
                Closed::Four(s) => {
                    let scale = s.a * s.a;
                    let res = s
                        .characteristic(s.lambda)
                        .abs()
                        .max(s.characteristic(s.lambda2).abs())
                        / scale;
                    charpoly.record(res, case);
                    let [g1, _, g3] = <[f64; 3]>::try_from(g.as_slice()).unwrap();
                    product.record((s.lambda * s.lambda2 - g1 * g3).abs() / (g1 * g3), case);
                    ortho.record(s.eigenvectors().orthogonality_defect(), case);
                    let ev = s.eigenvalues();
                    sym.record(
                        (0..4)
                            .map(|j| (ev[j] + ev[3 - j]).abs())
                            .fold(0.0, f64::max),
                        case,
                    );
                }
                Closed::Five(s) => {
                    let scale = s.a * s.a;
                    let res = s
                        .characteristic(s.lambda)
                        .abs()
                        .max(s.characteristic(s.lambda2).abs())
                        / scale;
                    charpoly.record(res, case);
                    product.record((s.lambda * s.lambda2 - s.b.sqrt()).abs() / s.b.sqrt(), case);
                    ortho.record(s.eigenvectors().orthogonality_defect(), case);
                    let ev = s.eigenvalues();
                    let d = (0..5)
                        .map(|j| (ev[j] + ev[4 - j]).abs())
                        .fold(0.0, f64::max);
                    sym.record(d.max(ev[2].abs()), case);
                }
            }

            let m = closed.exp(t);
            let reference = expm_series(&coupling_matrix(&g).to_dense(), t);
            oracle.record(m.max_abs_diff(&reference), case);
            unitarity.record(m.unitarity_defect(), case);
            symmetric.record(m.max_abs_diff(&m.transpose()), case);
            det.record((m.determinant() - 1.0).norm(), case);
            let composed = &closed.exp(s1) * &closed.exp(s2);
            group.record(closed.exp(s1 + s2).max_abs_diff(&composed), || {
                format!("{} s={s1:.17e} t={s2:.17e}", case())
            });
        }
    }
    let rate = if attempted == 0 {
        0.0
    } else {
        rejected as f64 / attempted as f64
    };
    degenerate.record(rate, || format!("rejected {rejected} of {attempted}"));
    vec![
        oracle, unitarity, symmetric, group, det, charpoly, product, ortho, sym, degenerate,
    ]
}

/// Spectral route against the series oracle for 2 to 8 levels.
pub fn cross_oracle_battery(seed: u64, draws: usize) -> Vec<PropertyResult> {
    let mut rng = rng_for(seed, 2);
    let mut agree = PropertyResult::new("spectral_vs_series", tol::SPECTRAL_VS_SERIES);
    let mut unit_spec = PropertyResult::new("spectral_unitarity", tol::ORACLE_UNITARITY);
    let mut unit_series = PropertyResult::new("series_unitarity", tol::ORACLE_UNITARITY);
    let mut sym = PropertyResult::new("spectral_symmetry", tol::SPECTRAL_SYMMETRY);
    let mut ortho = PropertyResult::new("eigenvector_orthogonality", tol::EIGEN_ORTHOGONALITY);
    let mut resid = PropertyResult::new("eigen_residual", tol::EIGEN_RESIDUAL);

    for draw in 0..draws {
        let levels = rng.gen_range(2..=8usize);
        let g = draw_couplings(&mut rng, levels - 1, 0.0, 10.0);
        let t = rng.gen_range(0.0..=20.0);
        let case = || {
            format!(
                "seed={seed} draw={draw} n={levels} g={} t={t:.17e}",
                fmt_vec(g.as_slice())
            )
        };
        let c = coupling_matrix(&g);
        let dec = match spectral::tridiag_eigen(&c) {
            Ok(d) => d,
            Err(e) => {
                agree.record_failure(format!("{}: {e}", case()));
                continue;
            }
        };
        let ev = &dec.eigenvalues;
        let n = ev.len();
        sym.record(
            (0..n)
                .map(|j| (ev[j] + ev[n - 1 - j]).abs())
                .fold(0.0, f64::max),
            case,
        );
        ortho.record(dec.eigenvectors.orthogonality_defect(), case);
        let scale = ev.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        resid.record(dec.residual(&c) / scale, case);

        let a = dec.exp_minus_i(t);
        let b = expm_series(&c.to_dense(), t);
        agree.record(a.max_abs_diff(&b), case);
        unit_spec.record(a.unitarity_defect(), case);
        unit_series.record(b.unitarity_defect(), case);
    }
    vec![agree, unit_spec, unit_series, sym, ortho, resid]
}

/// Lab-frame properties on random resonant models with 2 to 6 levels.
pub fn physics_battery(seed: u64, draws: usize) -> Vec<PropertyResult> {
    let mut rng = rng_for(seed, 3);
    let mut unitarity = PropertyResult::new("propagator_unitarity", tol::PROPAGATOR_UNITARITY);
    let mut kernels = PropertyResult::new("kernel_independence", tol::KERNEL_INDEPENDENCE);
    let mut phase = PropertyResult::new("phase_invariance", tol::PHASE_INVARIANCE);
    let mut shift = PropertyResult::new("energy_shift_covariance", tol::ENERGY_SHIFT);
    let mut herm = PropertyResult::new("hamiltonian_hermiticity", tol::HERMITICITY);
    let mut factor = PropertyResult::new("frame_factorization", tol::FACTORIZATION);
    let mut frame = PropertyResult::new("frame_unitarity", tol::FRAME_UNITARITY);
    let opts = PropagatorOptions::default();

    for draw in 0..draws {
        let levels = rng.gen_range(2..=6usize);
        let model = random_model(&mut rng, levels);
        let t = rng.gen_range(0.0..=20.0);
        let other_phis: Vec<f64> = (0..levels - 1).map(|_| rng.gen_range(-PI..PI)).collect();
        let c = rng.gen_range(-5.0..5.0);
        let case = || {
            format!(
                "seed={seed} draw={draw} {} t={t:.17e}",
                describe_model(&model)
            )
        };

        let h = build_hamiltonian(&model, t);
        herm.record(h.hermiticity_defect() / h.max_abs().max(1.0), case);
        let v = rotating_frame(&model, t);
        frame.record(v.unitarity_defect(), case);
        let mut inner = crate::model::coupling_matrix(model.couplings()).to_dense();
        for (k, d) in model.level_offsets().iter().enumerate() {
            inner[(k, k)] += d + model.energies()[0];
        }
        let rebuilt = &(&v.adjoint() * &inner) * &v;
        factor.record(rebuilt.max_abs_diff(&h), case);

        let evolver = match Evolver::new(&model, &opts) {
            Ok(e) => e,
            Err(e) => {
                unitarity.record_failure(format!("{}: {e}", case()));
                continue;
            }
        };
        let u = evolver.propagator(t);
        unitarity.record(u.unitarity_defect(), case);

        if let Ok(closed) = evolution::propagator(
            &model,
            t,
            &PropagatorOptions::with_kernel(Kernel::ClosedForm),
        ) {
            let spec =
                evolution::propagator(&model, t, &PropagatorOptions::with_kernel(Kernel::Spectral))
                    .expect("spectral kernel");
            kernels.record(closed.max_abs_diff(&spec), case);
        }

        let rephased = model.with_phis(other_phis).expect("same shape");
        let u2 = evolution::propagator(&rephased, t, &opts).expect("rephased model stays resonant");
        let p_diff = (0..levels)
            .map(|k| (u[(k, 0)].norm_sqr() - u2[(k, 0)].norm_sqr()).abs())
            .fold(0.0, f64::max);
        phase.record(p_diff, case);

        let shifted = model.shifted(c).expect("shift keeps ordering");
        let u3 = evolution::propagator(&shifted, t, &opts).expect("shifted model stays resonant");
        let expected = u.scale(num_complex::Complex64::from_polar(1.0, -t * c));
        shift.record(u3.max_abs_diff(&expected), || {
            format!("{} c={c:.17e}", case())
        });
    }
    vec![unitarity, kernels, phase, shift, herm, factor, frame]
}

/// Second-order convergence and absolute size of the central-difference
/// Schrödinger residual.
pub fn schrodinger_battery(seed: u64, draws: usize) -> Vec<PropertyResult> {
    let mut rng = rng_for(seed, 4);
    let mut ratio = PropertyResult::interval(
        "schrodinger_convergence_ratio",
        tol::RESIDUAL_RATIO_LO,
        tol::RESIDUAL_RATIO_HI,
    );
    let mut absolute = PropertyResult::new("schrodinger_residual", tol::RESIDUAL_ABS);
    let opts = PropagatorOptions::default();

    for draw in 0..draws {
        let levels = rng.gen_range(2..=6usize);
        let model = random_model(&mut rng, levels);
        let t = rng.gen_range(0.5..=5.0);
        let case = || {
            format!(
                "seed={seed} draw={draw} {} t={t:.17e}",
                describe_model(&model)
            )
        };
        let hnorm = build_hamiltonian(&model, t).max_abs();
        let h = 1e-3 / hnorm.max(1.0);
        let r = |step| evolution::schrodinger_residual(&model, t, step, &opts);
        match (r(h), r(h / 2.0), r(tol::RESIDUAL_STEP)) {
            (Ok(r1), Ok(r2), Ok(r3)) => {
                ratio.record(r1 / r2, || format!("{} h={h:.3e}", case()));
                absolute.record(r3 / hnorm, case);
            }
            (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => {
                absolute.record_failure(format!("{}: {e}", case()));
            }
        }
    }
    vec![ratio, absolute]
}

/// Runs every battery. The closed-form, cross-oracle and physics batteries
/// use `draws` draws; the Schrödinger battery uses `draws / 10` (at least
/// one) because each of its draws needs several propagators.
pub fn run(seed: u64, draws: usize) -> Result<VerifyReport> {
    if draws == 0 {
        return Err(Error::InvalidArgument("draws must be at least 1".into()));
    }
    let light = (draws / 10).max(1);
    let mut properties = closed_form_battery(seed, draws);
    properties.extend(cross_oracle_battery(seed, draws));
    properties.extend(physics_battery(seed, draws));
    properties.extend(schrodinger_battery(seed, light));
    Ok(VerifyReport {
        seed,
        draws,
        properties,
    })
}
