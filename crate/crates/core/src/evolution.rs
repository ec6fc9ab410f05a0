//! Lab-frame propagator, populations and time series.
//!
//! Under resonance the lab-frame propagator factorizes as
//! `U(t) = e^{-itE₀} V†(t) exp(-itC)`, so the only hard part is the
//! exponential of the coupling matrix. [`Evolver`] picks a kernel for that
//! exponential once per model and then evaluates `U(t)` cheaply for any `t`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::closed_form::{self, QuarticSpectrum4, QuinticSpectrum5};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::model::{
    build_hamiltonian, coupling_matrix, default_resonance_tol, resonance_report, LadderModel,
};
use crate::spectral::{self, SpectralDecomposition};

/// Unitarity slack tolerated by [`populations`].
pub const POPULATION_UNITARITY_TOL: f64 = 1e-8;

/// Which route computes `exp(-itC)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Closed form for 2 to 5 levels when it is non-singular, spectral otherwise.
    #[default]
    Auto,
    #[serde(alias = "closed")]
    ClosedForm,
    Spectral,
}

impl std::str::FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "closed" | "closed_form" => Ok(Self::ClosedForm),
            "spectral" => Ok(Self::Spectral),
            other => Err(Error::InvalidArgument(format!(
                "unknown kernel '{other}' (expected auto, closed or spectral)"
            ))),
        }
    }
}

/// The route actually taken after resolving [`Kernel::Auto`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelUsed {
    ClosedForm,
    Spectral,
}

impl std::fmt::Display for KernelUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ClosedForm => "closed_form",
            Self::Spectral => "spectral",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PropagatorOptions {
    pub kernel: Kernel,
    /// Return `U(t) U(0)†` so the propagator starts at the identity even when
    /// the drive phases are nonzero.
    pub normalize_initial: bool,
    /// Absolute resonance tolerance; `None` uses [`default_resonance_tol`].
    pub resonance_tol: Option<f64>,
}

impl PropagatorOptions {
    pub fn with_kernel(kernel: Kernel) -> Self {
        Self {
            kernel,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
enum CouplingKernel {
    Two(f64),
    Three(f64, f64),
    Four(QuarticSpectrum4),
    Five(QuinticSpectrum5),
    Spectral(SpectralDecomposition),
}

impl CouplingKernel {
    fn resolve(model: &LadderModel, kernel: Kernel) -> Result<Self> {
        let g = model.couplings();
        let closed = || -> Result<Self> {
            match *g.as_slice() {
                [g1] => Ok(Self::Two(g1)),
                [g1, g2] => Ok(Self::Three(g1, g2)),
                [_, _, _] => Ok(Self::Four(closed_form::spectrum4(g)?)),
                [_, _, _, _] => Ok(Self::Five(closed_form::spectrum5(g)?)),
                _ => Err(Error::UnsupportedDimension(g.len())),
            }
        };
        let spectral = || -> Result<Self> {
            Ok(Self::Spectral(spectral::tridiag_eigen(&coupling_matrix(
                g,
            ))?))
        };
        match kernel {
            Kernel::ClosedForm => closed(),
            Kernel::Spectral => spectral(),
            Kernel::Auto => match closed() {
                Err(
                    Error::DegenerateSpectrum(_)
                    | Error::AllZeroCouplings
                    | Error::UnsupportedDimension(_),
                ) => spectral(),
                other => other,
            },
        }
    }

    fn used(&self) -> KernelUsed {
        match self {
            Self::Spectral(_) => KernelUsed::Spectral,
            _ => KernelUsed::ClosedForm,
        }
    }

    fn exp_minus_i(&self, t: f64) -> ComplexMatrix {
        match self {
            Self::Two(g1) => closed_form::expc2(*g1, t),
            Self::Three(g1, g2) => closed_form::expc3(*g1, *g2, t),
            Self::Four(s) => s.exp_minus_i(t),
            Self::Five(s) => s.exp_minus_i(t),
            Self::Spectral(d) => d.exp_minus_i(t),
        }
    }
}

/// Evaluates `U(t)` for a fixed resonant model.
#[derive(Clone, Debug)]
pub struct Evolver {
    model: LadderModel,
    kernel: CouplingKernel,
    normalize_initial: bool,
}

impl Evolver {
    /// Checks resonance and resolves the kernel.
    pub fn new(model: &LadderModel, opts: &PropagatorOptions) -> Result<Self> {
        let tol = opts
            .resonance_tol
            .unwrap_or_else(|| default_resonance_tol(model));
        let report = resonance_report(model, tol);
        if !report.is_resonant {
            return Err(Error::NotResonant(report));
        }
        Ok(Self {
            model: model.clone(),
            kernel: CouplingKernel::resolve(model, opts.kernel)?,
            normalize_initial: opts.normalize_initial,
        })
    }

    pub fn kernel_used(&self) -> KernelUsed {
        self.kernel.used()
    }

    pub fn model(&self) -> &LadderModel {
        &self.model
    }

    /// `e^{-itE₀} V†(t) exp(-itC)`, optionally right-multiplied by `U(0)†`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        let u = self.raw(t);
        if self.normalize_initial {
            &u * &self.raw(0.0).adjoint()
        } else {
            u
        }
    }

    fn raw(&self, t: f64) -> ComplexMatrix {
        let mut u = self.kernel.exp_minus_i(t);
        let global = C64::from_polar(1.0, -t * self.model.energies()[0]);
        let frame = crate::model::rotating_frame(&self.model, t);
        for i in 0..u.dim() {
            let row_phase = global * frame[(i, i)].conj();
            for j in 0..u.dim() {
                u[(i, j)] *= row_phase;
            }
        }
        u
    }
}

/// The lab-frame propagator at time `t`.
pub fn propagator(model: &LadderModel, t: f64, opts: &PropagatorOptions) -> Result<ComplexMatrix> {
    Ok(Evolver::new(model, opts)?.propagator(t))
}

/// Born-rule populations `|U_{k,initial}|²` for a basis-state start.
pub fn populations(u: &ComplexMatrix, initial: usize) -> Result<Vec<f64>> {
    let n = u.dim();
    if initial >= n {
        return Err(Error::IndexOutOfRange {
            index: initial,
            dim: n,
        });
    }
    let defect = u.unitarity_defect();
    if defect.is_nan() || defect > POPULATION_UNITARITY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    Ok((0..n).map(|k| u[(k, initial)].norm_sqr()).collect())
}

/// Populations (and optionally full propagators) sampled on a time grid.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub kernel: KernelUsed,
    pub times: Vec<f64>,
    /// One row of `n` populations per grid point.
    pub populations: Vec<Vec<f64>>,
    pub propagators: Option<Vec<ComplexMatrix>>,
}

impl TimeSeries {
    /// Largest `|U U† - 1|` over the stored propagators, if any.
    pub fn max_unitarity_defect(&self) -> Option<f64> {
        self.propagators.as_ref().map(|us| {
            us.iter()
                .map(ComplexMatrix::unitarity_defect)
                .fold(0.0, f64::max)
        })
    }
}

/// Samples the dynamics on `grid`, which must be ascending and non-negative.
pub fn time_series(
    model: &LadderModel,
    grid: &[f64],
    initial: usize,
    opts: &PropagatorOptions,
    keep_propagators: bool,
) -> Result<TimeSeries> {
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidArgument(
            "time grid must be finite and non-negative".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("time grid must be ascending".into()));
    }
    if initial >= model.levels() {
        return Err(Error::IndexOutOfRange {
            index: initial,
            dim: model.levels(),
        });
    }
    let evolver = Evolver::new(model, opts)?;
    let mut pops = Vec::with_capacity(grid.len());
    let mut props = keep_propagators.then(|| Vec::with_capacity(grid.len()));
    for &t in grid {
        let u = evolver.propagator(t);
        pops.push(populations(&u, initial)?);
        if let Some(p) = props.as_mut() {
            p.push(u);
        }
    }
    Ok(TimeSeries {
        kernel: evolver.kernel_used(),
        times: grid.to_vec(),
        populations: pops,
        propagators: props,
    })
}

/// `n` evenly spaced points from `start` to `stop` inclusive; a single point
/// when `steps == 1`.
pub fn linear_grid(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let dt = (stop - start) / (steps - 1) as f64;
            (0..steps)
                .map(|k| {
                    if k == steps - 1 {
                        stop
                    } else {
                        start + dt * k as f64
                    }
                })
                .collect()
        }
    }
}

/// Default central-difference step, `1e-5 · max(1, 1/‖H(t)‖_max)`.
pub fn default_fd_step(model: &LadderModel, t: f64) -> f64 {
    let h = build_hamiltonian(model, t).max_abs();
    1e-5 * if h > 0.0 { 1.0_f64.max(1.0 / h) } else { 1.0 }
}

/// `‖ i (U(t+h) - U(t-h)) / 2h - H(t) U(t) ‖_max`.
///
/// Uses the unnormalized propagator; the equation is linear, so it holds
/// for either choice of `U(0)`.
pub fn schrodinger_residual(
    model: &LadderModel,
    t: f64,
    h: f64,
    opts: &PropagatorOptions,
) -> Result<f64> {
    if h.is_nan() || h <= 0.0 || t - h < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need h > 0 and t - h >= 0, got t = {t}, h = {h}"
        )));
    }
    let opts = PropagatorOptions {
        normalize_initial: false,
        ..opts.clone()
    };
    let evolver = Evolver::new(model, &opts)?;
    let plus = evolver.propagator(t + h);
    let minus = evolver.propagator(t - h);
    let derivative = (&plus - &minus).scale(C64::new(0.0, 1.0 / (2.0 * h)));
    let hu = &build_hamiltonian(model, t) * &evolver.propagator(t);
    Ok(derivative.max_abs_diff(&hu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingVector;
    use std::f64::consts::{PI, SQRT_2};

    fn model(e: &[f64], phis: &[f64], g: &[f64]) -> LadderModel {
        LadderModel::resonant(
            e.to_vec(),
            phis.to_vec(),
            CouplingVector::new(g.to_vec()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identity_at_zero_without_phases() {
        let m = model(&[0.0, 1.0, 1.8, 2.4], &[0.0; 3], &[1.0, 2.0, 3.0]);
        let u = propagator(&m, 0.0, &PropagatorOptions::default()).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn phases_show_up_at_zero() {
        let m = model(&[0.0, 1.0, 1.8], &[PI / 3.0, 0.0], &[1.0, 1.0]);
        let u = propagator(&m, 0.0, &PropagatorOptions::default()).unwrap();
        let p = C64::from_polar(1.0, -PI / 3.0);
        let expect = ComplexMatrix::from_diagonal(&[C64::new(1.0, 0.0), p, p]);
        assert!(u.max_abs_diff(&expect) < 1e-15);

        let opts = PropagatorOptions {
            normalize_initial: true,
            ..Default::default()
        };
        let u = propagator(&m, 0.0, &opts).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn full_transfer_regardless_of_phase() {
        for phis in [[0.0, 0.0], [0.4, -2.0], [PI, PI / 2.0]] {
            let m = model(&[0.0, 1.0, 1.8], &phis, &[1.0, 1.0]);
            let u = propagator(&m, PI / SQRT_2, &PropagatorOptions::default()).unwrap();
            let p = populations(&u, 0).unwrap();
            assert!((p[2] - 1.0).abs() < 1e-12 && p[0] < 1e-12 && p[1] < 1e-12);
        }
    }

    #[test]
    fn not_resonant_is_reported() {
        let m = LadderModel::new(
            vec![0.0, 1.0, 1.8],
            vec![1.0, 0.9],
            vec![0.0; 2],
            CouplingVector::new(vec![1.0, 1.0]).unwrap(),
        )
        .unwrap();
        match propagator(&m, 1.0, &PropagatorOptions::default()) {
            Err(Error::NotResonant(r)) => assert!((r.detunings[1] + 0.1).abs() < 1e-12),
            other => panic!("expected NotResonant, got {other:?}"),
        }
    }

    #[test]
    fn populations_examples_and_errors() {
        assert_eq!(
            populations(&ComplexMatrix::identity(3), 0).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        let p = populations(&closed_form::expc2(1.0, PI / 4.0), 0).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = populations(&closed_form::expc3(1.0, 1.0, PI / SQRT_2), 0).unwrap();
        assert!((p[2] - 1.0).abs() < 1e-15);

        assert!(matches!(
            populations(&ComplexMatrix::identity(2), 2),
            Err(Error::IndexOutOfRange { .. })
        ));
        let bad = ComplexMatrix::identity(2).scale(C64::new(1.1, 0.0));
        assert!(matches!(populations(&bad, 0), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn kernel_selection() {
        let m = model(&[0.0, 1.0, 1.8, 2.4], &[0.0; 3], &[1.0, 0.0, 1.0]);
        let e = Evolver::new(&m, &PropagatorOptions::default()).unwrap();
        assert_eq!(e.kernel_used(), KernelUsed::Spectral);
        assert!(Evolver::new(&m, &PropagatorOptions::with_kernel(Kernel::ClosedForm)).is_err());

        let m = model(&[0.0, 1.0, 1.8, 2.4], &[0.0; 3], &[1.0, 2.0, 3.0]);
        let e = Evolver::new(&m, &PropagatorOptions::default()).unwrap();
        assert_eq!(e.kernel_used(), KernelUsed::ClosedForm);

        let m = model(&[0.0, 1.0, 1.9, 2.7, 3.4, 4.0], &[0.0; 5], &[1.0; 5]);
        let e = Evolver::new(&m, &PropagatorOptions::default()).unwrap();
        assert_eq!(e.kernel_used(), KernelUsed::Spectral);
        assert!(matches!(
            Evolver::new(&m, &PropagatorOptions::with_kernel(Kernel::ClosedForm)),
            Err(Error::UnsupportedDimension(5))
        ));
    }

    #[test]
    fn time_series_two_level() {
        let m = model(&[0.0, 1.0], &[0.0], &[0.5]);
        let grid = linear_grid(0.0, 2.0 * PI, 41);
        let ts = time_series(&m, &grid, 0, &PropagatorOptions::default(), false).unwrap();
        for (t, p) in ts.times.iter().zip(&ts.populations) {
            assert!((p[0] - (0.5 * t).cos().powi(2)).abs() < 1e-14);
        }
        assert!((ts.populations[20][1] - 1.0).abs() < 1e-14);

        let ts = time_series(&m, &[0.0], 0, &PropagatorOptions::default(), true).unwrap();
        assert_eq!(ts.populations, vec![vec![1.0, 0.0]]);
        assert!(ts.max_unitarity_defect().unwrap() < 1e-15);
    }

    #[test]
    fn time_series_rejects_bad_grid() {
        let m = model(&[0.0, 1.0], &[0.0], &[0.5]);
        let opts = PropagatorOptions::default();
        assert!(time_series(&m, &[1.0, 0.5], 0, &opts, false).is_err());
        assert!(time_series(&m, &[-1.0], 0, &opts, false).is_err());
        assert!(time_series(&m, &[0.0], 5, &opts, false).is_err());
    }

    #[test]
    fn linear_grid_endpoints() {
        assert_eq!(linear_grid(0.0, 1.0, 1), vec![0.0]);
        let g = linear_grid(0.0, PI / SQRT_2, 2);
        assert_eq!(g, vec![0.0, PI / SQRT_2]);
        assert_eq!(linear_grid(1.0, 2.0, 5)[4], 2.0);
    }

    #[test]
    fn residual_free_evolution() {
        // Only finite-difference truncation remains, about h² E³ / 6.
        let m = model(&[0.0, 0.4, 0.7], &[0.2, 0.1], &[0.0, 0.0]);
        let r = schrodinger_residual(&m, 1.0, 1e-4, &PropagatorOptions::default()).unwrap();
        assert!(r <= 1e-9, "{r}");
        assert!(schrodinger_residual(&m, 0.0, 1e-4, &PropagatorOptions::default()).is_err());
    }

    #[test]
    fn residual_is_second_order() {
        let m = model(&[0.0, 1.0, 1.8, 2.4], &[0.3, 0.0, 1.0], &[1.0, 2.0, 3.0]);
        let opts = PropagatorOptions::default();
        let r1 = schrodinger_residual(&m, 1.0, 1e-3, &opts).unwrap();
        let r2 = schrodinger_residual(&m, 1.0, 5e-4, &opts).unwrap();
        let ratio = r1 / r2;
        assert!((3.7..=4.3).contains(&ratio), "ratio {ratio}");
    }
}
