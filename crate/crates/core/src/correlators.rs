//! The four L∪R correlators that determine ρ_{PR₁}.
//!
//! At finite N each correlator is a scramblon-resummed integral over the
//! perturbation strength created by the message fermions. The message leg
//! carries the (possibly string-encoded) kernel at θ = β/2 + i·t_LR; the
//! coupling legs always use the single-fermion probe function at θ = β/2:
//!
//! ```text
//! I3 = i ∫ h_Ψ(y) exp{iμN[f(e^{-iκβ/4} λ₀ y) − G]} dy
//! I1 =   ∫ (h_Ψ * h_Ψ)(y) exp{iμN[f(e^{-iκβ/4} λ₀ y) − G]} dy
//! I2 = |I3|²
//! I4 = −i ∬ h_Ψ(y₁) h_Ψ⁰(y₂) exp{iμN[f(e^{-iκβ/4} λ₀ y₁ + λ₁ y₂) − f(λ₁ y₂)]} dy₁ dy₂
//! ```
//!
//! with `h_Ψ⁰` the message kernel at θ = 0. At N = ∞ the exponent is
//! linearized and everything follows from I3 in closed form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    base_kernel, compose, inv_pow, scramblon_weights, string_kernel, ComplexTime, GammaKernel,
    ModelParams,
};
use crate::quadrature::{integrate_1d, integrate_2d, integrate_2d_with, QuadResult, QuadratureSpec};
use crate::special::gamma;

/// κ(t_L + t_R)/2 at and beyond which the long-time closed forms may stand
/// in for quadrature.
pub const LONG_TIME_THRESHOLD: f64 = 25.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Insertion times, coupling and encoding for one run of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolPoint {
    pub t_l: f64,
    pub t_r: f64,
    pub mu: f64,
    pub encode_len: u32,
}

impl ProtocolPoint {
    pub fn new(t_l: f64, t_r: f64, mu: f64, encode_len: u32) -> Result<Self> {
        let pt = Self { t_l, t_r, mu, encode_len };
        pt.validate()?;
        Ok(pt)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_l >= 0.0 && self.t_r >= 0.0) || !self.t_l.is_finite() || !self.t_r.is_finite()
        {
            return Err(Error::Argument(format!(
                "insertion times must be finite and non-negative, got t_L = {}, t_R = {}",
                self.t_l, self.t_r
            )));
        }
        if !self.mu.is_finite() {
            return Err(Error::Argument("coupling must be finite".into()));
        }
        if self.encode_len == 0 || self.encode_len % 2 == 0 {
            return Err(Error::Argument(format!(
                "encoding length must be a positive odd integer, got {}",
                self.encode_len
            )));
        }
        Ok(())
    }

    pub fn t_lr(&self) -> f64 {
        self.t_l - self.t_r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FiniteN,
    ProbeLimit,
    LongTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub i1: Complex64,
    pub i2: Complex64,
    pub i3: Complex64,
    pub i4: Complex64,
    pub err1: f64,
    pub err2: f64,
    pub err3: f64,
    pub err4: f64,
    pub mode: Mode,
}

/// Probe function `f(x) = coef/(rate + x)^shape` with Γ(shape) folded in.
#[derive(Debug, Clone, Copy)]
struct ProbeFn {
    coef: Complex64,
    rate: Complex64,
    shape: f64,
}

impl ProbeFn {
    fn new(k: &GammaKernel) -> Self {
        Self { coef: k.norm * gamma(k.shape), rate: k.rate, shape: k.shape }
    }

    /// NaN outside the right half-plane so that a violated branch
    /// condition surfaces as a non-finite quadrature sum.
    #[inline]
    fn eval(&self, x: Complex64) -> Complex64 {
        let z = self.rate + x;
        if z.re > 0.0 {
            self.coef * z.powf(-self.shape)
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        }
    }
}

fn mu_n(params: &ModelParams, pt: &ProtocolPoint) -> Result<f64> {
    params.n_majorana().finite().map(|n| pt.mu * n).ok_or(Error::InfiniteN)
}

/// The three kernels entering the finite-N integrals.
struct Legs {
    message: GammaKernel,
    spectator: GammaKernel,
    coupling: ProbeFn,
    g_half: Complex64,
}

fn legs(params: &ModelParams, pt: &ProtocolPoint) -> Result<Legs> {
    pt.validate()?;
    let message = string_kernel(params, ComplexTime::half_beta(params, pt.t_lr()), pt.encode_len)?;
    let spectator = string_kernel(params, ComplexTime::zero(), pt.encode_len)?;
    let coupling = ProbeFn::new(&base_kernel(params, ComplexTime::half_beta(params, 0.0))?);
    let g_half = coupling.eval(Complex64::new(0.0, 0.0));
    Ok(Legs { message, spectator, coupling, g_half })
}

/// ∫ k(y) exp{iμN[f(phase·λ·y) − f(0)]} dy
fn single_leg(
    k: &GammaKernel,
    coupling: ProbeFn,
    mu_n: f64,
    scaled: Complex64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let f0 = coupling.eval(Complex64::new(0.0, 0.0));
    let i_mu_n = I * mu_n;
    if mu_n == 0.0 {
        return integrate_1d(k, |_| Complex64::new(1.0, 0.0), spec);
    }
    integrate_1d(k, |y| (i_mu_n * (coupling.eval(scaled * y) - f0)).exp(), spec)
}

/// ℐ₃ at finite N.
pub fn i3_finite(
    params: &ModelParams,
    pt: &ProtocolPoint,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let mn = mu_n(params, pt)?;
    let w = scramblon_weights(params, pt.t_l, pt.t_r)?;
    let l = legs(params, pt)?;
    let r = single_leg(&l.message, l.coupling, mn, w.phase * w.lambda0, spec)?;
    Ok((I * r.value, r.err_estimate))
}

/// ℐ₁ at finite N: the composite ψ¹ψ² kernel against the same weight as ℐ₃.
pub fn i1_finite(
    params: &ModelParams,
    pt: &ProtocolPoint,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let mn = mu_n(params, pt)?;
    let w = scramblon_weights(params, pt.t_l, pt.t_r)?;
    let l = legs(params, pt)?;
    let composite = compose(&l.message, &l.message)?;
    let r = single_leg(&composite, l.coupling, mn, w.phase * w.lambda0, spec)?;
    Ok((r.value, r.err_estimate))
}

/// ℐ₂ = |ℐ₃|² with first-order error propagation.
pub fn i2_finite(
    params: &ModelParams,
    pt: &ProtocolPoint,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let (i3, e3) = i3_finite(params, pt, spec)?;
    Ok(i2_from_i3(i3, e3))
}

fn i2_from_i3(i3: Complex64, e3: f64) -> (Complex64, f64) {
    (Complex64::new(i3.norm_sqr(), 0.0), 2.0 * i3.norm() * e3)
}

/// ℐ₄ at finite N, a double integral over the perturbations of ψ¹ and ψ².
pub fn i4_finite(
    params: &ModelParams,
    pt: &ProtocolPoint,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    let mn = mu_n(params, pt)?;
    let w = scramblon_weights(params, pt.t_l, pt.t_r)?;
    let l = legs(params, pt)?;
    let r = if mn == 0.0 {
        integrate_2d(&l.message, &l.spectator, |_, _| Complex64::new(1.0, 0.0), spec)?
    } else {
        let a = w.phase * w.lambda0;
        let lam1 = w.lambda1;
        let f = l.coupling;
        let i_mu_n = I * mn;
        integrate_2d_with(
            &l.message,
            &l.spectator,
            |y2| {
                let b = Complex64::new(lam1 * y2, 0.0);
                (b, f.eval(b))
            },
            |y1, &(b, fb)| (i_mu_n * (f.eval(a * y1 + b) - fb)).exp(),
            spec,
        )?
    };
    Ok((-I * r.value, r.err_estimate))
}

/// All four correlators at finite N.
pub fn finite_set(
    params: &ModelParams,
    pt: &ProtocolPoint,
    spec: &QuadratureSpec,
) -> Result<CorrelatorSet> {
    let (i3, err3) = i3_finite(params, pt, spec)?;
    let (i2, err2) = i2_from_i3(i3, err3);
    let (i1, err1) = i1_finite(params, pt, spec)?;
    let (i4, err4) = i4_finite(params, pt, spec)?;
    Ok(CorrelatorSet { i1, i2, i3, i4, err1, err2, err3, err4, mode: Mode::FiniteN })
}

/// Closed-form correlators at N = ∞, where the density matrix is fixed by
/// the linear response ℐ₃.
///
/// Only the N-free product μ·Nλ₀ enters, so any `params.n_majorana()` is
/// accepted; the sweep calls this for the ∞ sentinel.
pub fn probe_set(params: &ModelParams, pt: &ProtocolPoint) -> Result<CorrelatorSet> {
    pt.validate()?;
    let th = ComplexTime::half_beta(params, 0.0);
    let upsilon1 = base_kernel(params, th)?.moment(1)?;
    let coupling = pt.mu * params.n_lambda0(pt.t_l, pt.t_r);
    let x = I * params.scramblon_phase() * coupling * upsilon1;
    let message = string_kernel(params, ComplexTime::half_beta(params, pt.t_lr()), pt.encode_len)?;
    let i3 = I * message.laplace(x)?;
    Ok(CorrelatorSet {
        i1: -(i3 * i3),
        i2: Complex64::new(i3.norm_sqr(), 0.0),
        i3,
        i4: -i3 / 2.0,
        err1: 0.0,
        err2: 0.0,
        err3: 0.0,
        err4: 0.0,
        mode: Mode::ProbeLimit,
    })
}

/// κ(t_L + t_R)/2 for this point.
pub fn scrambling_exponent(params: &ModelParams, pt: &ProtocolPoint) -> f64 {
    0.5 * params.kappa() * (pt.t_l + pt.t_r)
}

/// First-order size of ∫|k(y)|·|f(a·y)| dy using |1 + a y|^{-2Δ} ≤ (a y)^{-Δ}.
fn remainder_scale(k: &GammaKernel, coupling_shape: f64, coef: f64, a: f64) -> f64 {
    let half = 0.5 * coupling_shape;
    let s = k.shape - half;
    coef * a.powf(-half) * k.norm.norm() * gamma(s) * k.rate.re.powf(-s)
}

/// The t_L, t_R → ∞ limits of the finite-N correlators, which no longer
/// decay. The error fields hold a first-order estimate of the distance to
/// the finite-time values.
pub fn long_time_set(params: &ModelParams, pt: &ProtocolPoint) -> Result<CorrelatorSet> {
    let mn = mu_n(params, pt)?;
    let w = scramblon_weights(params, pt.t_l, pt.t_r)?;
    let l = legs(params, pt)?;
    let f_msg = l.message.laplace(Complex64::new(0.0, 0.0))?;
    let phase = (-I * mn * l.g_half).exp();
    let i3 = I * phase * f_msg;
    let i1 = phase * f_msg * f_msg;
    let spect_mass = l.spectator.mass()?;
    let i4 = -I * f_msg * spect_mass;

    let coupling_shape = 2.0 * params.delta();
    let coef = 0.5 * params.cos_half_pi_v().powf(coupling_shape);
    let a0 = w.lambda0 * w.phase.re;
    let r3 = mn.abs() * remainder_scale(&l.message, coupling_shape, coef, a0);
    let composite = compose(&l.message, &l.message)?;
    let r1 = mn.abs() * remainder_scale(&composite, coupling_shape, coef, a0);
    let r4 = mn.abs()
        * (remainder_scale(&l.message, coupling_shape, coef, a0) * spect_mass.norm()
            + 2.0 * remainder_scale(&l.spectator, coupling_shape, coef, w.lambda1) * f_msg.norm());
    let (i2, err2) = i2_from_i3(i3, r3);
    Ok(CorrelatorSet { i1, i2, i3, i4, err1: r1, err2, err3: r3, err4: r4, mode: Mode::LongTime })
}

/// How [`evaluate`] treats a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    pub quadrature: QuadratureSpec,
    /// Substitute the long-time limits once κ(t_L+t_R)/2 reaches
    /// [`LONG_TIME_THRESHOLD`].
    pub long_time_fast_path: bool,
}

/// Correlators by the path appropriate for the model's N.
pub fn evaluate(params: &ModelParams, pt: &ProtocolPoint, opts: &EvalOptions) -> Result<CorrelatorSet> {
    if !params.n_majorana().is_finite() {
        return probe_set(params, pt);
    }
    if opts.long_time_fast_path && scrambling_exponent(params, pt) >= LONG_TIME_THRESHOLD {
        return long_time_set(params, pt);
    }
    finite_set(params, pt, &opts.quadrature)
}

fn require_equal_times(pt: &ProtocolPoint) -> Result<()> {
    if pt.t_lr() != 0.0 {
        return Err(Error::Argument(
            "the infinite-temperature representation is defined for t_L = t_R".into(),
        ));
    }
    Ok(())
}

/// ℐ₃ in the infinite-temperature representation: every ϑ taken at θ = 0
/// and a unit scramblon phase. This is the integral that
/// [`perturbative_i3_hot`] expands.
pub fn i3_hot_exact(
    params: &ModelParams,
    pt: &ProtocolPoint,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    require_equal_times(pt)?;
    let mn = mu_n(params, pt)?;
    let w = scramblon_weights(params, pt.t_l, pt.t_r)?;
    let message = string_kernel(params, ComplexTime::zero(), pt.encode_len)?;
    let coupling = ProbeFn::new(&base_kernel(params, ComplexTime::zero())?);
    let r = single_leg(&message, coupling, mn, Complex64::new(w.lambda0, 0.0), spec)?;
    Ok((I * r.value, r.err_estimate))
}

/// Expansion of [`i3_hot_exact`] through second order in λ₀ at fixed μN,
/// keeping the linear term resummed:
///
/// ℐ₃ ≈ i[f_Ψ(p) + (iμN/2)·Υ²·λ₀²·∫h_Ψ(y) y² e^{−py} dy],  p = iμN·Υ¹·λ₀
///
/// with Υ^m the single-fermion vertices at θ = 0. For ϑ(0) → 1 this is
/// (i/2)[(1+p)^{−2Δ} + (iμN/2)·Γ(2Δ+2)/Γ(2Δ)·Υ²λ₀²·(1+p)^{−2Δ−2}].
pub fn perturbative_i3_hot(params: &ModelParams, pt: &ProtocolPoint) -> Result<Complex64> {
    pt.validate()?;
    require_equal_times(pt)?;
    let mn = mu_n(params, pt)?;
    let w = scramblon_weights(params, pt.t_l, pt.t_r)?;
    let coupling = base_kernel(params, ComplexTime::zero())?;
    let u1 = coupling.moment(1)?;
    let u2 = coupling.moment(2)?;
    let message = string_kernel(params, ComplexTime::zero(), pt.encode_len)?;
    let p = I * mn * u1 * w.lambda0;
    let lead = message.laplace(p)?;
    let s = message.shape + 2.0;
    let second_moment = message.norm * gamma(s) * inv_pow(message.rate + p, s, "perturbative_i3_hot")?;
    let correction = I * mn / 2.0 * u2 * w.lambda0 * w.lambda0 * second_moment;
    Ok(I * (lead + correction))
}

/// Out-of-time-order correlator F = ∫ f(λy, θ₁₂)·h(y, θ₃₄) dy.
pub fn otoc(
    params: &ModelParams,
    theta_pair_early: ComplexTime,
    theta_pair_late: ComplexTime,
    lambda: Complex64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let probe = ProbeFn::new(&base_kernel(params, theta_pair_early)?);
    let source = base_kernel(params, theta_pair_late)?;
    integrate_1d(&source, |y| probe.eval(lambda * y), spec)
}
