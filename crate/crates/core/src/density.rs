//! Reduced density matrix of the message qubit P and the first right
//! qubit R₁, and the information measures computed from it.
//!
//! With O(2) symmetry between the two message Majoranas,
//!
//! ```text
//! ρ = ¼[1 + iρ⁽²⁾(ψ_P¹ψ_R¹ + ψ_P²ψ_R²) + ρ⁽⁴⁾ ψ_P¹ψ_P²ψ_R¹ψ_R²]
//! ```
//!
//! realized on two qubits by
//!
//! ```text
//! ψ_P¹ = X⊗1/√2   ψ_P² = Y⊗1/√2   ψ_R¹ = Z⊗X/√2   ψ_R² = Z⊗Y/√2
//! ```
//!
//! with P the first (most significant) qubit. Then
//! ρ = ¼[1 + (ρ⁽²⁾/2)(Y⊗X − X⊗Y) − (ρ⁽⁴⁾/4) Z⊗Z].

use std::f64::consts::LN_2;
use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::CorrelatorSet;
use crate::error::{Error, Result};

/// Default width of the band of negative eigenvalues clamped to zero.
pub const CLAMP_TOL: f64 = 1e-9;

const SELF_TEST_TOL: f64 = 1e-12;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub(crate) fn pauli() -> [Matrix2<C>; 4] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Matrix2::new(one, o, o, one),
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

/// The four Majoranas ψ_P¹, ψ_P², ψ_R¹, ψ_R² as 4×4 matrices.
pub fn majoranas() -> Result<&'static [Matrix4<C>; 4]> {
    static REP: OnceLock<std::result::Result<[Matrix4<C>; 4], String>> = OnceLock::new();
    REP.get_or_init(|| {
        let [id, x, y, z] = pauli();
        let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = [
            x.kronecker(&id) * s,
            y.kronecker(&id) * s,
            z.kronecker(&x) * s,
            z.kronecker(&y) * s,
        ];
        self_test(&psi).map(|_| psi)
    })
    .as_ref()
    .map_err(|e| Error::Representation(e.clone()))
}

fn self_test(psi: &[Matrix4<C>; 4]) -> std::result::Result<(), String> {
    for (j, a) in psi.iter().enumerate() {
        if (a - a.adjoint()).camax() > SELF_TEST_TOL {
            return Err(format!("ψ{j} is not self-adjoint"));
        }
        for (k, b) in psi.iter().enumerate() {
            let anti = a * b + b * a;
            let expect = if j == k { Matrix4::identity() } else { Matrix4::zeros() };
            let dev = (anti - expect).camax();
            if dev > SELF_TEST_TOL {
                return Err(format!("{{ψ{j}, ψ{k}}} deviates from δ by {dev:.3e}"));
            }
        }
    }
    Ok(())
}

/// ρ⁽²⁾ = 2Re[ℐ₃ − 2ℐ₄], ρ⁽⁴⁾ = 8Re[ℐ₂ − ℐ₁].
pub fn coefficients_from_correlators(cs: &CorrelatorSet) -> (f64, f64) {
    (2.0 * (cs.i3 - 2.0 * cs.i4).re, 8.0 * (cs.i2 - cs.i1).re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixPR1 {
    pub rho2: f64,
    pub rho4: f64,
    pub matrix: Matrix4<C>,
}

/// Eigenvalues sorted descending, with any that were clamped to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: [f64; 4],
    pub clamp_report: Vec<(usize, f64)>,
}

/// Entropies in nats unless converted with [`InfoMeasures::in_bits`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoMeasures {
    pub mutual_info: f64,
    pub negativity: f64,
    pub entropy_joint: f64,
    pub entropy_p: f64,
    pub entropy_r1: f64,
    pub clamp_report: Vec<(usize, f64)>,
}

impl InfoMeasures {
    pub fn in_bits(mut self) -> Self {
        self.mutual_info /= LN_2;
        self.entropy_joint /= LN_2;
        self.entropy_p /= LN_2;
        self.entropy_r1 /= LN_2;
        self
    }
}

/// Builds ρ_{PR₁} by literal multiplication of the Majorana matrices.
pub fn assemble(rho2: f64, rho4: f64) -> Result<DensityMatrixPR1> {
    let [p1, p2, r1, r2] = majoranas()?;
    let bilinear = p1 * r1 + p2 * r2;
    let quartic = p1 * p2 * r1 * r2;
    let matrix = (Matrix4::identity() + bilinear * c(0.0, rho2) + quartic * c(rho4, 0.0)) * c(0.25, 0.0);
    Ok(DensityMatrixPR1 { rho2, rho4, matrix })
}

impl DensityMatrixPR1 {
    /// (U_P ⊗ U_R) ρ (U_P ⊗ U_R)†
    pub fn conjugated(&self, u_p: &Matrix2<C>, u_r: &Matrix2<C>) -> Self {
        let u = u_p.kronecker(u_r);
        Self { matrix: u * self.matrix * u.adjoint(), ..self.clone() }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.matrix - self.matrix.adjoint()).camax()
    }

    pub fn trace(&self) -> C {
        self.matrix.trace()
    }

    /// Reduced state of P (`keep_p`) or of R₁.
    pub fn partial_trace(&self, keep_p: bool) -> Matrix2<C> {
        let m = &self.matrix;
        Matrix2::from_fn(|a, b| {
            (0..2)
                .map(|k| if keep_p { m[(2 * a + k, 2 * b + k)] } else { m[(2 * k + a, 2 * k + b)] })
                .sum()
        })
    }

    /// Transpose of the P factor: ⟨p r|ρ^{T_P}|p' r'⟩ = ⟨p' r|ρ|p r'⟩.
    pub fn partial_transpose_p(&self) -> Matrix4<C> {
        let m = &self.matrix;
        Matrix4::from_fn(|i, j| {
            let (p, r) = (i / 2, i % 2);
            let (pp, rp) = (j / 2, j % 2);
            m[(2 * pp + r, 2 * p + rp)]
        })
    }
}

fn hermitian_eigenvalues4(m: &Matrix4<C>) -> [f64; 4] {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut ev: [f64; 4] = h.symmetric_eigenvalues().as_slice().try_into().unwrap();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn hermitian_eigenvalues2(m: &Matrix2<C>) -> [f64; 2] {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let ev = h.symmetric_eigenvalues();
    [ev[0].max(ev[1]), ev[0].min(ev[1])]
}

/// Eigenvalues of ρ. Values in [−clamp_tol, 0) are set to zero and the
/// spectrum is renormalized to unit sum; anything lower is an error.
pub fn spectrum(dm: &DensityMatrixPR1, clamp_tol: f64) -> Result<Spectrum> {
    let mut values = hermitian_eigenvalues4(&dm.matrix);
    let mut clamp_report = Vec::new();
    for (i, v) in values.iter_mut().enumerate() {
        if *v < -clamp_tol {
            return Err(Error::NonPhysicalState { eigenvalue: *v });
        }
        if *v < 0.0 {
            clamp_report.push((i, *v));
            *v = 0.0;
        }
    }
    if !clamp_report.is_empty() {
        let total: f64 = values.iter().sum();
        values.iter_mut().for_each(|v| *v /= total);
    }
    Ok(Spectrum { values, clamp_report })
}

/// −Σ p ln p with 0·ln 0 = 0.
pub fn von_neumann(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// S(P) + S(R₁) − S(PR₁) in nats.
pub fn mutual_information(dm: &DensityMatrixPR1) -> Result<f64> {
    Ok(info_measures(dm, CLAMP_TOL)?.mutual_info)
}

/// Sum of the moduli of the negative eigenvalues of ρ^{T_P}.
pub fn negativity(dm: &DensityMatrixPR1) -> f64 {
    hermitian_eigenvalues4(&dm.partial_transpose_p())
        .iter()
        .filter(|&&x| x < 0.0)
        .map(|x| -x)
        .sum::<f64>()
        + 0.0
}

pub fn info_measures(dm: &DensityMatrixPR1, clamp_tol: f64) -> Result<InfoMeasures> {
    let spec = spectrum(dm, clamp_tol)?;
    let entropy_joint = von_neumann(&spec.values);
    let entropy_p = von_neumann(&hermitian_eigenvalues2(&dm.partial_trace(true)));
    let entropy_r1 = von_neumann(&hermitian_eigenvalues2(&dm.partial_trace(false)));
    let mi = entropy_p + entropy_r1 - entropy_joint;
    Ok(InfoMeasures {
        mutual_info: if mi < 0.0 && mi > -1e-10 { 0.0 } else { mi },
        negativity: negativity(dm),
        entropy_joint,
        entropy_p,
        entropy_r1,
        clamp_report: spec.clamp_report,
    })
}

/// Correlators → (ρ⁽²⁾, ρ⁽⁴⁾, measures).
pub fn from_correlators(cs: &CorrelatorSet, clamp_tol: f64) -> Result<(f64, f64, InfoMeasures)> {
    let (rho2, rho4) = coefficients_from_correlators(cs);
    let dm = assemble(rho2, rho4)?;
    Ok((rho2, rho4, info_measures(&dm, clamp_tol)?))
}
