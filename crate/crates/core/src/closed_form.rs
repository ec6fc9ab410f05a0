//! Analytic `exp(-itC)` for ladders of two to five levels.
//!
//! For four and five levels the characteristic polynomial of `C` is
//! biquadratic (times `λ` for five levels), so the spectrum is `±λ, ±λ₂`
//! (and `0`) in closed form and the eigenvectors have explicit components.
//! The exponential then has only two oscillation frequencies, `λ` and `λ₂`,
//! and every entry is a fixed combination of `cos`/`sin` of `λt` and `λ₂t`.
//!
//! Where those formulas are singular (coinciding eigenvalues, vanishing
//! normalizers) the functions here return [`Error::DegenerateSpectrum`]
//! rather than patching the math; callers fall back to
//! [`crate::spectral`].

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, RealMatrix};
use crate::model::CouplingVector;

/// Relative threshold below which a closed form is treated as singular.
pub const EPS_DEGENERATE: f64 = 1e-8;
/// Relative size below which `A - 2√B` is clamped to zero.
pub const EPS_CLAMP: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

/// Fills the lower triangle from the upper one.
fn symmetric_from_upper(n: usize, upper: impl Fn(usize, usize) -> C64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z = upper(i, j);
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    m
}

/// Two levels: a plain Rabi rotation at frequency `g1`.
pub fn expc2(g1: f64, t: f64) -> ComplexMatrix {
    let (s, c) = (g1 * t).sin_cos();
    symmetric_from_upper(2, |i, j| if i == j { re(c) } else { im(-s) })
}

/// Three levels. The spectrum is `{Ω, 0, -Ω}` with `Ω = √(g1² + g2²)`.
pub fn expc3(g1: f64, g2: f64, t: f64) -> ComplexMatrix {
    let omega2 = g1 * g1 + g2 * g2;
    if omega2 == 0.0 {
        return ComplexMatrix::identity(3);
    }
    let omega = omega2.sqrt();
    let (s, c) = (omega * t).sin_cos();
    let a11 = re((g1 * g1 * c + g2 * g2) / omega2);
    let a12 = im(-g1 * s / omega);
    let a13 = re(g1 * g2 * (c - 1.0) / omega2);
    let a22 = re(c);
    let a23 = im(-g2 * s / omega);
    let a33 = re((g2 * g2 * c + g1 * g1) / omega2);
    let upper = [[a11, a12, a13], [ZERO, a22, a23], [ZERO, ZERO, a33]];
    symmetric_from_upper(3, |i, j| upper[i][j])
}

fn take<const N: usize>(g: &CouplingVector) -> Result<[f64; N]> {
    <[f64; N]>::try_from(g.as_slice())
        .map_err(|_| Error::ModelInvalid(format!("expected {N} couplings, got {}", g.len())))
}

/// Closed-form spectrum of the four-level coupling matrix.
///
/// The characteristic polynomial is `λ⁴ - (g1²+g2²+g3²)λ² + g1²g3²`, with
/// roots `±λ`, `±λ₂` where `λ = (√A + √B)/2` and `λ₂ = g1 g3 / λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuarticSpectrum4 {
    pub lambda: f64,
    pub lambda2: f64,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub y: f64,
    g: [f64; 3],
}

/// Spectrum and eigenvector normalizers for four levels.
pub fn spectrum4(g: &CouplingVector) -> Result<QuarticSpectrum4> {
    let [g1, g2, g3] = take::<3>(g)?;
    let a = g2 * g2 + (g1 + g3).powi(2);
    let b = g2 * g2 + (g1 - g3).powi(2);
    if a == 0.0 {
        return Err(Error::AllZeroCouplings);
    }
    if b.sqrt() <= EPS_DEGENERATE * a.sqrt() {
        return Err(Error::DegenerateSpectrum(format!(
            "B = {b:e} vanishes relative to A = {a:e}; λ₂ and λ₃ coincide"
        )));
    }
    let lambda = (a.sqrt() + b.sqrt()) / 2.0;
    let lambda2 = g1 * g3 / lambda;

    let (s1, s2, s3) = (g1 * g1, g2 * g2, g3 * g3);
    let l2 = lambda * lambda;
    let x_rad = 2.0 * (l2 * (-s1 + s2 + s3) + s1 * (s1 + s2 - s3));
    let y_rad = 2.0 * (s3 * (-s1 + s2 + s3) + l2 * (s1 + s2 - s3));
    for (name, rad) in [("X", x_rad), ("Y", y_rad)] {
        if rad <= EPS_DEGENERATE * a * a {
            return Err(Error::DegenerateSpectrum(format!(
                "{name} normalizer radicand {rad:e} is not positive relative to A² = {:e}",
                a * a
            )));
        }
    }
    Ok(QuarticSpectrum4 {
        lambda,
        lambda2,
        a,
        b,
        x: 1.0 / x_rad.sqrt(),
        y: 1.0 / y_rad.sqrt(),
        g: [g1, g2, g3],
    })
}

impl QuarticSpectrum4 {
    /// `(λ, λ₂, -λ₂, -λ)`.
    pub fn eigenvalues(&self) -> [f64; 4] {
        [self.lambda, self.lambda2, -self.lambda2, -self.lambda]
    }

    /// `μ⁴ - (g1²+g2²+g3²)μ² + g1²g3²`.
    pub fn characteristic(&self, mu: f64) -> f64 {
        let [g1, g2, g3] = self.g;
        let m2 = mu * mu;
        m2 * m2 - (g1 * g1 + g2 * g2 + g3 * g3) * m2 + g1 * g1 * g3 * g3
    }

    /// The orthogonal matrix whose columns are the analytic eigenvectors,
    /// ordered like [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> RealMatrix {
        let [g1, g2, g3] = self.g;
        let (l, x, y) = (self.lambda, self.x, self.y);
        let p = l * l - g1 * g1;
        let q = g3 * g3 - l * l;
        RealMatrix::from_columns(&[
            vec![g1 * g2 * x, l * g2 * x, p * x, g3 * p / l * x],
            vec![l * g2 * y, g2 * g3 * y, g1 * q / l * y, q * y],
            vec![-l * g2 * y, g2 * g3 * y, -g1 * q / l * y, q * y],
            vec![g1 * g2 * x, -l * g2 * x, p * x, -g3 * p / l * x],
        ])
    }

    /// `exp(-itC)` assembled entry by entry.
    pub fn exp_minus_i(&self, t: f64) -> ComplexMatrix {
        let [g1, g2, g3] = self.g;
        let l = self.lambda;
        let (x2, y2) = (self.x * self.x, self.y * self.y);
        let (sl, cl) = (l * t).sin_cos();
        let (sm, cm) = (self.lambda2 * t).sin_cos();
        let p = l * l - g1 * g1;
        let q = g3 * g3 - l * l;

        let a11 = 2.0 * g2 * g2 * (g1 * g1 * x2 * cl + l * l * y2 * cm);
        let a12 = -2.0 * l * g2 * g2 * (g1 * x2 * sl + g3 * y2 * sm);
        let a13 = 2.0 * g1 * g2 * (p * x2 * cl + q * y2 * cm);
        let a14 = -2.0 * g2 * (g1 * g3 * p / l * x2 * sl + l * q * y2 * sm);
        let a22 = 2.0 * g2 * g2 * (l * l * x2 * cl + g3 * g3 * y2 * cm);
        let a23 = -2.0 * g2 * (l * p * x2 * sl + g1 * g3 * q / l * y2 * sm);
        let a24 = 2.0 * g2 * g3 * (p * x2 * cl + q * y2 * cm);
        let a33 = 2.0 * (p * p * x2 * cl + g1 * g1 * q * q / (l * l) * y2 * cm);
        let a34 = -2.0 / l * (g3 * p * p * x2 * sl + g1 * q * q * y2 * sm);
        let a44 = 2.0 * (g3 * g3 * p * p / (l * l) * x2 * cl + q * q * y2 * cm);

        let upper = [
            [re(a11), im(a12), re(a13), im(a14)],
            [ZERO, re(a22), im(a23), re(a24)],
            [ZERO, ZERO, re(a33), im(a34)],
            [ZERO, ZERO, ZERO, re(a44)],
        ];
        symmetric_from_upper(4, |i, j| upper[i][j])
    }
}

/// Four levels. Propagates [`Error::DegenerateSpectrum`].
pub fn expc4(g: &CouplingVector, t: f64) -> Result<ComplexMatrix> {
    Ok(spectrum4(g)?.exp_minus_i(t))
}

/// Closed-form spectrum of the five-level coupling matrix.
///
/// The characteristic polynomial is `λ(λ⁴ - Aλ² + B)`; the roots are
/// `±λ`, `±λ₂` and `0`, with `λ₂ = √B / λ`.
///
/// The differences `λ² - g1²`, `λ² - g1² - g2²` and their `λ₂` counterparts
/// are evaluated in rationalized form, and the normalizers `X`, `Y` as the
/// inverse norms of the unnormalized eigenvectors. Both are exact
/// rearrangements; they avoid the cancellation the direct expressions
/// suffer near `A ≈ 2√B` or when one normalizer radicand is small.
#[derive(Clone, Debug, PartialEq)]
pub struct QuinticSpectrum5 {
    pub lambda: f64,
    pub lambda2: f64,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub y: f64,
    g: [f64; 4],
    terms: QuinticTerms,
}

#[derive(Clone, Debug, PartialEq)]
struct QuinticTerms {
    /// `λ² - g1²`
    p: f64,
    /// `λ² - g1² - g2²`
    q: f64,
    /// `B/λ² - g1²`
    p2: f64,
    /// `B/λ² - g1² - g2²`
    q2: f64,
}

/// Spectrum and eigenvector normalizers for five levels.
pub fn spectrum5(g: &CouplingVector) -> Result<QuinticSpectrum5> {
    let [g1, g2, g3, g4] = take::<4>(g)?;
    let (s1, s2, s3, s4) = (g1 * g1, g2 * g2, g3 * g3, g4 * g4);
    let a = s1 + s2 + s3 + s4;
    let b = s1 * s3 + s1 * s4 + s2 * s4;
    if a == 0.0 {
        return Err(Error::AllZeroCouplings);
    }
    if b <= EPS_DEGENERATE * a * a {
        return Err(Error::DegenerateSpectrum(format!(
            "B = {b:e} vanishes relative to A² = {:e}; λ₂ collides with 0",
            a * a
        )));
    }
    let sqrt_b = b.sqrt();

    // A² - 4B = (g1²+g2²-g3²-g4²)² + 4 g2² g3², a sum of squares.
    let s = s3 + s4 - s1 - s2;
    let disc = s.hypot(2.0 * g2 * g3);
    let mut gap2 = disc * disc / (a + 2.0 * sqrt_b); // A - 2√B
    if gap2 <= EPS_CLAMP * a {
        gap2 = 0.0;
    }
    if gap2 <= EPS_DEGENERATE * a {
        return Err(Error::DegenerateSpectrum(format!(
            "A - 2√B = {gap2:e} vanishes relative to A = {a:e}; λ and λ₂ coincide"
        )));
    }
    let lambda = ((a + 2.0 * sqrt_b).sqrt() + gap2.sqrt()) / 2.0;
    let lambda2 = sqrt_b / lambda;

    let q = if s >= 0.0 {
        (s + disc) / 2.0
    } else {
        2.0 * s2 * s3 / (disc - s)
    };
    let q2 = if s > 0.0 {
        -2.0 * s2 * s3 / (s + disc)
    } else {
        (s - disc) / 2.0
    };
    let t1 = s + 2.0 * s2;
    let d14 = (g1 - g4) * (g1 + g4);
    let p = if t1 >= 0.0 {
        (t1 + disc) / 2.0
    } else {
        2.0 * s2 * d14 / (disc - t1)
    };
    let p2 = if t1 > 0.0 {
        -2.0 * s2 * d14 / (t1 + disc)
    } else {
        (t1 - disc) / 2.0
    };
    let terms = QuinticTerms { p, q, p2, q2 };

    let x_rad = norm2(&top_vector(lambda, [g1, g2, g3, g4], &terms));
    let y_rad = norm2(&mid_vector(lambda, sqrt_b, [g1, g2, g3, g4], &terms));
    if x_rad <= EPS_DEGENERATE * a.powi(3) {
        return Err(Error::DegenerateSpectrum(format!(
            "X normalizer radicand {x_rad:e} is not positive relative to A³ = {:e}",
            a.powi(3)
        )));
    }
    if y_rad <= EPS_DEGENERATE * a.powi(4) {
        return Err(Error::DegenerateSpectrum(format!(
            "Y normalizer radicand {y_rad:e} is not positive relative to A⁴ = {:e}",
            a.powi(4)
        )));
    }

    Ok(QuinticSpectrum5 {
        lambda,
        lambda2,
        a,
        b,
        x: 1.0 / x_rad.sqrt(),
        y: 1.0 / y_rad.sqrt(),
        g: [g1, g2, g3, g4],
        terms,
    })
}

fn norm2(v: &[f64; 5]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Unnormalized eigenvector for `λ`.
fn top_vector(l: f64, [g1, g2, g3, g4]: [f64; 4], k: &QuinticTerms) -> [f64; 5] {
    [g1 * g2 * g3, l * g2 * g3, k.p * g3, l * k.q, k.q * g4]
}

/// Unnormalized eigenvector for `λ₂`.
fn mid_vector(l: f64, sqrt_b: f64, [g1, g2, g3, g4]: [f64; 4], k: &QuinticTerms) -> [f64; 5] {
    [
        l * g1 * g2 * g3,
        sqrt_b * g2 * g3,
        l * g3 * k.p2,
        sqrt_b * k.q2,
        l * g4 * k.q2,
    ]
}

impl QuinticSpectrum5 {
    /// `(λ, λ₂, 0, -λ₂, -λ)`.
    pub fn eigenvalues(&self) -> [f64; 5] {
        [self.lambda, self.lambda2, 0.0, -self.lambda2, -self.lambda]
    }

    /// The biquadratic factor `μ⁴ - Aμ² + B` of the characteristic polynomial.
    pub fn characteristic(&self, mu: f64) -> f64 {
        let m2 = mu * mu;
        m2 * m2 - self.a * m2 + self.b
    }

    /// The normalizer radicands in their original (unrearranged) form:
    /// `2{(g3²+g4²)A - 2B}λ² + 2(g1²+g2²-g3²-g4²)B` and
    /// `2B{(g3²+g4²)A - 2B + (g1²+g2²-g3²-g4²)λ²}`.
    pub fn direct_radicands(&self) -> (f64, f64) {
        let [g1, g2, g3, g4] = self.g;
        let (a, b, l2) = (self.a, self.b, self.lambda * self.lambda);
        let outer = g3 * g3 + g4 * g4;
        let diff = g1 * g1 + g2 * g2 - outer;
        let x = 2.0 * (outer * a - 2.0 * b) * l2 + 2.0 * diff * b;
        let y = 2.0 * b * (outer * a - 2.0 * b + diff * l2);
        (x, y)
    }

    /// Columns are the analytic eigenvectors, ordered like [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> RealMatrix {
        let [g1, g2, g3, g4] = self.g;
        let sqrt_b = self.b.sqrt();
        let v1 = top_vector(self.lambda, self.g, &self.terms).map(|c| c * self.x);
        let v2 = mid_vector(self.lambda, sqrt_b, self.g, &self.terms).map(|c| c * self.y);
        let v3 = vec![
            g2 * g4 / sqrt_b,
            0.0,
            -g1 * g4 / sqrt_b,
            0.0,
            g1 * g3 / sqrt_b,
        ];
        let alternate = |v: [f64; 5], flip_odd: bool| -> Vec<f64> {
            v.iter()
                .enumerate()
                .map(|(i, &c)| if (i % 2 == 1) == flip_odd { -c } else { c })
                .collect()
        };
        RealMatrix::from_columns(&[
            v1.to_vec(),
            v2.to_vec(),
            v3,
            alternate(v2, false),
            alternate(v1, true),
        ])
    }

    /// `exp(-itC)` assembled entry by entry.
    pub fn exp_minus_i(&self, t: f64) -> ComplexMatrix {
        let [g1, g2, g3, g4] = self.g;
        let QuinticTerms { p, q, p2, q2 } = self.terms;
        let (l, b) = (self.lambda, self.b);
        let l2 = l * l;
        let sqrt_b = b.sqrt();
        let (x2, y2) = (self.x * self.x, self.y * self.y);
        let (sl, cl) = (l * t).sin_cos();
        let (sm, cm) = (self.lambda2 * t).sin_cos();

        let a11 =
            g2 * g2 * g4 * g4 / b + 2.0 * g1 * g1 * g2 * g2 * g3 * g3 * (x2 * cl + l2 * y2 * cm);
        let a12 = -2.0 * l * g1 * g2 * g2 * g3 * g3 * (x2 * sl + sqrt_b * y2 * sm);
        let a13 =
            -g1 * g2 * g4 * g4 / b + 2.0 * g1 * g2 * g3 * g3 * (p * x2 * cl + l2 * p2 * y2 * cm);
        let a14 = -2.0 * l * g1 * g2 * g3 * (q * x2 * sl + sqrt_b * q2 * y2 * sm);
        let a15 = g1 * g2 * g3 * g4 * (1.0 / b + 2.0 * q * x2 * cl + 2.0 * l2 * q2 * y2 * cm);
        let a22 = 2.0 * g2 * g2 * g3 * g3 * (l2 * x2 * cl + b * y2 * cm);
        let a23 = -2.0 * l * g2 * g3 * g3 * (p * x2 * sl + sqrt_b * p2 * y2 * sm);
        let a24 = 2.0 * g2 * g3 * (l2 * q * x2 * cl + b * q2 * y2 * cm);
        let a25 = -2.0 * l * g2 * g3 * g4 * (q * x2 * sl + sqrt_b * q2 * y2 * sm);
        let a33 =
            g1 * g1 * g4 * g4 / b + 2.0 * g3 * g3 * (p * p * x2 * cl + l2 * p2 * p2 * y2 * cm);
        let a34 = -2.0 * l * g3 * (p * q * x2 * sl + sqrt_b * p2 * q2 * y2 * sm);
        let a35 =
            -g1 * g1 * g3 * g4 / b + 2.0 * g3 * g4 * (p * q * x2 * cl + l2 * p2 * q2 * y2 * cm);
        let a44 = 2.0 * l2 * q * q * x2 * cl + 2.0 * b * q2 * q2 * y2 * cm;
        let a45 = -2.0 * l * g4 * (q * q * x2 * sl + sqrt_b * q2 * q2 * y2 * sm);
        let a55 =
            g1 * g1 * g3 * g3 / b + 2.0 * g4 * g4 * (q * q * x2 * cl + l2 * q2 * q2 * y2 * cm);

        let upper = [
            [re(a11), im(a12), re(a13), im(a14), re(a15)],
            [ZERO, re(a22), im(a23), re(a24), im(a25)],
            [ZERO, ZERO, re(a33), im(a34), re(a35)],
            [ZERO, ZERO, ZERO, re(a44), im(a45)],
            [ZERO, ZERO, ZERO, ZERO, re(a55)],
        ];
        symmetric_from_upper(5, |i, j| upper[i][j])
    }
}

/// Five levels. Propagates [`Error::DegenerateSpectrum`].
pub fn expc5(g: &CouplingVector, t: f64) -> Result<ComplexMatrix> {
    Ok(spectrum5(g)?.exp_minus_i(t))
}

/// Dispatches to the closed form matching the number of couplings.
pub fn expc(g: &CouplingVector, t: f64) -> Result<ComplexMatrix> {
    match *g.as_slice() {
        [g1] => Ok(expc2(g1, t)),
        [g1, g2] => Ok(expc3(g1, g2, t)),
        [_, _, _] => expc4(g, t),
        [_, _, _, _] => expc5(g, t),
        _ => Err(Error::UnsupportedDimension(g.len())),
    }
}
