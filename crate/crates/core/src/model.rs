//! The driven ladder: levels, drives, couplings.
//!
//! Level `k` (0-based) has energy `E_k`; drive `k` (1-based in the physics,
//! stored at index `k - 1`) couples levels `k - 1` and `k` with strength
//! `g_k`, angular frequency `ω_k` and phase `φ_k`. Units have ħ = 1, so
//! energies and frequencies share one angular-frequency unit.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, RealMatrix};

/// Relative resonance tolerance, in units of `max_k Δ_k`.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-9;

/// Non-negative coupling constants `g_1 .. g_{n-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CouplingVector(Vec<f64>);

impl CouplingVector {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        if g.is_empty() {
            return Err(Error::ModelInvalid(
                "at least one coupling is required".into(),
            ));
        }
        if let Some((k, &x)) = g
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < 0.0)
        {
            return Err(Error::ModelInvalid(format!(
                "coupling g{} = {x} must be finite and non-negative",
                k + 1
            )));
        }
        Ok(Self(g))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Number of levels, `len + 1`.
    pub fn levels(&self) -> usize {
        self.0.len() + 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}

impl TryFrom<Vec<f64>> for CouplingVector {
    type Error = Error;

    fn try_from(g: Vec<f64>) -> Result<Self> {
        Self::new(g)
    }
}

impl From<CouplingVector> for Vec<f64> {
    fn from(g: CouplingVector) -> Self {
        g.0
    }
}

/// Real symmetric tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTridiagonal {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::ModelInvalid(format!(
                "tridiagonal needs n >= 1 diagonal and n-1 off-diagonal entries, got {} and {}",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        if diagonal.iter().chain(&off_diagonal).any(|x| !x.is_finite()) {
            return Err(Error::ModelInvalid(
                "tridiagonal entries must be finite".into(),
            ));
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn to_real(&self) -> RealMatrix {
        let n = self.dim();
        let mut m = RealMatrix::zeros(n);
        for k in 0..n {
            m[(k, k)] = self.diagonal[k];
        }
        for (k, &e) in self.off_diagonal.iter().enumerate() {
            m[(k, k + 1)] = e;
            m[(k + 1, k)] = e;
        }
        m
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        ComplexMatrix::from_real(&self.to_real())
    }
}

/// The coupling matrix: zero diagonal, off-diagonal `g`.
pub fn coupling_matrix(g: &CouplingVector) -> SymmetricTridiagonal {
    SymmetricTridiagonal {
        diagonal: vec![0.0; g.levels()],
        off_diagonal: g.as_slice().to_vec(),
    }
}

/// Full physical scenario: level energies, drive frequencies and phases,
/// couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderModel {
    energies: Vec<f64>,
    omegas: Vec<f64>,
    phis: Vec<f64>,
    couplings: CouplingVector,
}

impl LadderModel {
    pub fn new(
        energies: Vec<f64>,
        omegas: Vec<f64>,
        phis: Vec<f64>,
        couplings: CouplingVector,
    ) -> Result<Self> {
        let n = energies.len();
        if n < 2 {
            return Err(Error::ModelInvalid(format!(
                "need at least 2 levels, got {n}"
            )));
        }
        for (name, len) in [
            ("omegas", omegas.len()),
            ("phis", phis.len()),
            ("couplings", couplings.len()),
        ] {
            if len != n - 1 {
                return Err(Error::ModelInvalid(format!(
                    "{name} has {len} entries, expected {} for {n} levels",
                    n - 1
                )));
            }
        }
        if energies
            .iter()
            .chain(&omegas)
            .chain(&phis)
            .any(|x| !x.is_finite())
        {
            return Err(Error::ModelInvalid(
                "energies, omegas and phis must be finite".into(),
            ));
        }
        if let Some(k) = (1..n).find(|&k| energies[k] <= energies[k - 1]) {
            return Err(Error::ModelInvalid(format!(
                "energies must be strictly increasing: E{} = {} <= E{} = {}",
                k,
                energies[k],
                k - 1,
                energies[k - 1]
            )));
        }
        Ok(Self {
            energies,
            omegas,
            phis,
            couplings,
        })
    }

    /// Model whose drives sit exactly on the level spacings, `ω_k = E_k - E_{k-1}`.
    pub fn resonant(energies: Vec<f64>, phis: Vec<f64>, couplings: CouplingVector) -> Result<Self> {
        let omegas = energies.windows(2).map(|w| w[1] - w[0]).collect();
        Self::new(energies, omegas, phis, couplings)
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn couplings(&self) -> &CouplingVector {
        &self.couplings
    }

    /// `Δ_k = E_k - E_0` for `k = 0 .. n-1` (so `Δ_0 = 0`).
    pub fn level_offsets(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e - self.energies[0]).collect()
    }

    /// Indices `k` (1-based spacing index) where the spacing `E_k - E_{k-1}`
    /// fails to shrink relative to the spacing below it.
    pub fn anharmonicity_violations(&self) -> Vec<usize> {
        let gaps: Vec<f64> = self.energies.windows(2).map(|w| w[1] - w[0]).collect();
        (1..gaps.len())
            .filter(|&k| gaps[k] >= gaps[k - 1])
            .map(|k| k + 1)
            .collect()
    }

    /// Human-readable advisories. The dynamics are well defined regardless.
    pub fn warnings(&self) -> Vec<String> {
        self.anharmonicity_violations()
            .into_iter()
            .map(|k| {
                format!(
                    "level spacing E{k}-E{} is not smaller than E{}-E{}; ladder is not anharmonic",
                    k - 1,
                    k - 1,
                    k - 2
                )
            })
            .collect()
    }

    /// Same model with every energy shifted by `c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(
            self.energies.iter().map(|e| e + c).collect(),
            self.omegas.clone(),
            self.phis.clone(),
            self.couplings.clone(),
        )
    }

    /// Same model with different drive phases.
    pub fn with_phis(&self, phis: Vec<f64>) -> Result<Self> {
        Self::new(
            self.energies.clone(),
            self.omegas.clone(),
            phis,
            self.couplings.clone(),
        )
    }

    /// Accumulated drive phases `θ_k(t) = Σ_{j<=k} (ω_j t + φ_j)`, `θ_0 = 0`.
    fn frame_phases(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.levels());
        let (mut wsum, mut psum) = (0.0, 0.0);
        out.push(0.0);
        for (w, p) in self.omegas.iter().zip(&self.phis) {
            wsum += w;
            psum += p;
            out.push(wsum * t + psum);
        }
        out
    }
}

/// The lab-frame Hamiltonian at time `t`.
pub fn build_hamiltonian(model: &LadderModel, t: f64) -> ComplexMatrix {
    let n = model.levels();
    let mut h = ComplexMatrix::zeros(n);
    for (k, &e) in model.energies.iter().enumerate() {
        h[(k, k)] = C64::new(e, 0.0);
    }
    for (k, ((&g, &w), &p)) in model
        .couplings
        .as_slice()
        .iter()
        .zip(&model.omegas)
        .zip(&model.phis)
        .enumerate()
    {
        let z = C64::from_polar(g, w * t + p);
        h[(k, k + 1)] = z;
        h[(k + 1, k)] = z.conj();
    }
    h
}

/// The diagonal rotating-frame unitary `V(t)`.
pub fn rotating_frame(model: &LadderModel, t: f64) -> ComplexMatrix {
    let diag: Vec<C64> = model
        .frame_phases(t)
        .into_iter()
        .map(|th| C64::from_polar(1.0, th))
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Per-drive detunings and the verdict at a given tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceReport {
    /// `δ_k = (Δ_k - Δ_{k-1}) - ω_k`, stored at index `k - 1`.
    pub detunings: Vec<f64>,
    pub tol: f64,
    pub is_resonant: bool,
}

impl ResonanceReport {
    pub fn max_abs_detuning(&self) -> f64 {
        self.detunings.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// One line per drive: `k  detuning`.
    pub fn table(&self) -> String {
        let mut s = String::from("k\tdetuning\n");
        for (i, d) in self.detunings.iter().enumerate() {
            s.push_str(&format!("{}\t{:.6e}\n", i + 1, d));
        }
        s
    }
}

/// Detuning check against an absolute tolerance.
pub fn resonance_report(model: &LadderModel, tol: f64) -> ResonanceReport {
    let detunings: Vec<f64> = model
        .energies
        .windows(2)
        .zip(&model.omegas)
        .map(|(w, om)| (w[1] - w[0]) - om)
        .collect();
    let is_resonant = detunings.iter().all(|d| d.abs() <= tol);
    ResonanceReport {
        detunings,
        tol,
        is_resonant,
    }
}

/// The default absolute tolerance for a model: `DEFAULT_RESONANCE_TOL · max_k Δ_k`.
pub fn default_resonance_tol(model: &LadderModel) -> f64 {
    let span = model.level_offsets().into_iter().fold(0.0, f64::max);
    DEFAULT_RESONANCE_TOL * span
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g(v: &[f64]) -> CouplingVector {
        CouplingVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn coupling_vector_rejects_negative_and_empty() {
        assert!(CouplingVector::new(vec![]).is_err());
        assert!(CouplingVector::new(vec![1.0, -0.1]).is_err());
        assert!(CouplingVector::new(vec![f64::NAN]).is_err());
        assert!(CouplingVector::new(vec![0.0, 0.0]).unwrap().is_all_zero());
    }

    #[test]
    fn model_validation() {
        let err = LadderModel::new(
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0; 2],
            g(&[1.0, 1.0]),
        );
        assert!(matches!(err, Err(Error::ModelInvalid(_))));
        let err = LadderModel::new(vec![0.0, 1.0, 2.0], vec![1.0], vec![0.0; 2], g(&[1.0, 1.0]));
        assert!(matches!(err, Err(Error::ModelInvalid(_))));
        let err = LadderModel::new(vec![0.0, 1.0], vec![1.0], vec![0.0], g(&[1.0, 1.0]));
        assert!(matches!(err, Err(Error::ModelInvalid(_))));
    }

    #[test]
    fn anharmonicity_is_advisory() {
        let m = LadderModel::resonant(vec![0.0, 1.0, 2.5], vec![0.0; 2], g(&[1.0, 1.0])).unwrap();
        assert_eq!(m.anharmonicity_violations(), vec![2]);
        assert_eq!(m.warnings().len(), 1);
        let ok = LadderModel::resonant(vec![0.0, 1.0, 1.8], vec![0.0; 2], g(&[1.0, 1.0])).unwrap();
        assert!(ok.warnings().is_empty());
    }

    #[test]
    fn hamiltonian_two_level_at_zero() {
        let m = LadderModel::new(vec![0.0, 1.0], vec![1.0], vec![0.0], g(&[0.5])).unwrap();
        let h = build_hamiltonian(&m, 0.0);
        let expect = ComplexMatrix::from_row_major(
            2,
            vec![
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.5, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(h.max_abs_diff(&expect) < 1e-16);
    }

    #[test]
    fn hamiltonian_decoupled_is_diagonal() {
        let m = LadderModel::resonant(vec![0.0, 1.0, 1.8, 2.4], vec![0.3, 0.2, 0.1], g(&[0.0; 3]))
            .unwrap();
        let h = build_hamiltonian(&m, 3.7);
        let expect = ComplexMatrix::from_diagonal(&[0.0, 1.0, 1.8, 2.4].map(|e| C64::new(e, 0.0)));
        assert_eq!(h, expect);
    }

    #[test]
    fn hamiltonian_phases_at_zero() {
        let m = LadderModel::new(
            vec![0.0, 1.0, 1.8],
            vec![1.0, 0.8],
            vec![PI / 2.0, 0.0],
            g(&[1.0, 2.0]),
        )
        .unwrap();
        let h = build_hamiltonian(&m, 0.0);
        assert!((h[(0, 1)] - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((h[(1, 0)] - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((h[(1, 2)] - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(h[(0, 2)], C64::new(0.0, 0.0));
    }

    #[test]
    fn rotating_frame_examples() {
        let m = LadderModel::new(
            vec![0.0, 2.0, 5.0],
            vec![2.0, 3.0],
            vec![0.0; 2],
            g(&[1.0, 1.0]),
        )
        .unwrap();
        assert_eq!(rotating_frame(&m, 0.0), ComplexMatrix::identity(3));
        let v = rotating_frame(&m, 1.0);
        assert!((v[(1, 1)] - C64::from_polar(1.0, 2.0)).norm() < 1e-15);
        assert!((v[(2, 2)] - C64::from_polar(1.0, 5.0)).norm() < 1e-15);
        assert_eq!(v[(0, 0)], C64::new(1.0, 0.0));

        let m = LadderModel::new(vec![0.0, 1.0], vec![1.0], vec![PI], g(&[1.0])).unwrap();
        let v = rotating_frame(&m, 0.0);
        assert!((v[(1, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn resonance_examples() {
        let m = LadderModel::new(
            vec![0.0, 1.0, 1.8],
            vec![1.0, 0.8],
            vec![0.0; 2],
            g(&[1.0, 1.0]),
        )
        .unwrap();
        let r = resonance_report(&m, 1e-9);
        assert!(r.is_resonant);
        assert!(r.detunings.iter().all(|d| d.abs() < 1e-15));

        let m = LadderModel::new(
            vec![0.0, 1.0, 1.8],
            vec![1.0, 0.9],
            vec![0.0; 2],
            g(&[1.0, 1.0]),
        )
        .unwrap();
        let r = resonance_report(&m, 1e-9);
        assert!(!r.is_resonant);
        assert!((r.detunings[1] + 0.1).abs() < 1e-12);
        assert!(r.table().contains("2\t-1.0"));

        let m = LadderModel::new(vec![0.0, 2.0], vec![2.0 + 1e-12], vec![0.0], g(&[1.0])).unwrap();
        assert!(resonance_report(&m, 1e-9).is_resonant);
        assert!((default_resonance_tol(&m) - 2e-9).abs() < 1e-24);
    }

    #[test]
    fn coupling_matrix_examples() {
        let c = coupling_matrix(&g(&[1.0]));
        assert_eq!(
            c.to_real(),
            RealMatrix::from_columns(&[vec![0.0, 1.0], vec![1.0, 0.0]])
        );
        let c = coupling_matrix(&g(&[1.0, 2.0, 3.0]));
        assert_eq!(c.dim(), 4);
        assert_eq!(c.diagonal(), &[0.0; 4]);
        assert_eq!(c.off_diagonal(), &[1.0, 2.0, 3.0]);
        let c = coupling_matrix(&g(&[0.0, 0.0]));
        assert_eq!(c.to_real(), RealMatrix::zeros(3));
    }
}
