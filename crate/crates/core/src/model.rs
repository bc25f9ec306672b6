//! Large-q SYK model constants and the gamma-kernel algebra of vertex
//! functions.
//!
//! Every perturbation distribution `h(y, θ)` in the large-q model has the
//! form `c·y^(α-1)·e^(-ϑy)`. Its Laplace transform is the probe function
//! `f(x, θ) = c·Γ(α)/(ϑ+x)^α` and its moments are the scattering vertices
//! `Υ^m`. Retarded and advanced vertices coincide in this model, so one
//! kernel type serves both roles.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::special::{beta, gamma};

/// Relative tolerance when checking that two kernels share a decay rate.
pub const RATE_MATCH_TOL: f64 = 1e-12;

/// Number of Majorana fermions on one side: finite, or the probe-limit
/// sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemSize {
    Finite(u64),
    Infinite,
}

impl SystemSize {
    pub fn is_finite(&self) -> bool {
        matches!(self, SystemSize::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            SystemSize::Finite(n) => Some(*n as f64),
            SystemSize::Infinite => None,
        }
    }
}

impl fmt::Display for SystemSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSize::Finite(n) => write!(f, "{n}"),
            SystemSize::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for SystemSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(SystemSize::Infinite);
        }
        match s.parse::<u64>() {
            Ok(n) if n > 0 => Ok(SystemSize::Finite(n)),
            _ => Err(Error::Argument(format!(
                "system size must be a positive integer or 'inf', got '{s}'"
            ))),
        }
    }
}

impl Serialize for SystemSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SystemSize::Finite(n) => s.serialize_u64(*n),
            SystemSize::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SystemSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(0) => Err(serde::de::Error::custom("system size must be positive")),
            Raw::Int(n) => Ok(SystemSize::Finite(n)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Constants of the large-q SYK model in the `v` parametrization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    q: u32,
    v: f64,
    beta: f64,
    n: SystemSize,
}

impl ModelParams {
    pub fn new(q: u32, v: f64, beta: f64, n: SystemSize) -> Result<Self> {
        if q < 4 || q % 2 != 0 {
            return Err(Error::Argument(format!("q must be an even integer >= 4, got {q}")));
        }
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Argument(format!("v must lie in (0, 1), got {v}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Argument(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { q, v, beta, n })
    }

    /// q = 4, β = 1 with the given chaos parameter and size.
    pub fn syk4(v: f64, n: SystemSize) -> Result<Self> {
        Self::new(4, v, 1.0, n)
    }

    pub fn with_size(&self, n: SystemSize) -> Self {
        Self { n, ..*self }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Fermion scaling dimension Δ = 1/q.
    pub fn delta(&self) -> f64 {
        1.0 / self.q as f64
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_majorana(&self) -> SystemSize {
        self.n
    }

    /// 𝒥 from βJ = πv / cos(πv/2).
    pub fn j_coupling(&self) -> f64 {
        PI * self.v / (PI * self.v / 2.0).cos() / self.beta
    }

    /// Lyapunov exponent κ = 2πv/β.
    pub fn kappa(&self) -> f64 {
        2.0 * PI * self.v / self.beta
    }

    /// cos(πv/2), the recurring combination in the vertex functions.
    pub fn cos_half_pi_v(&self) -> f64 {
        (PI * self.v / 2.0).cos()
    }

    /// C/N = 4Δ²cos(πv/2). Finite for every N, including the sentinel.
    pub fn c_per_n(&self) -> f64 {
        let d = self.delta();
        4.0 * d * d * self.cos_half_pi_v()
    }

    /// Scramblon prefactor C = 4Δ²N·cos(πv/2); `None` for N = ∞.
    pub fn c_prefactor(&self) -> Option<f64> {
        self.n.finite().map(|n| self.c_per_n() * n)
    }

    /// N·λ₀ = N·e^{κ(t_L+t_R)/2}/C, which does not depend on N.
    pub fn n_lambda0(&self, t_l: f64, t_r: f64) -> f64 {
        (0.5 * self.kappa() * (t_l + t_r)).exp() / self.c_per_n()
    }

    /// The phase e^{-iκβ/4} = e^{-iπv/2} attached to the β/2 configuration.
    pub fn scramblon_phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.kappa() * self.beta / 4.0)
    }
}

/// Complex time θ = τ + i t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexTime(pub Complex64);

impl ComplexTime {
    pub fn new(tau: f64, t: f64) -> Self {
        Self(Complex64::new(tau, t))
    }

    /// θ = β/2 + i·t_LR, the configuration of the L/R message pair.
    pub fn half_beta(params: &ModelParams, t_lr: f64) -> Self {
        Self::new(params.beta() / 2.0, t_lr)
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }
}

/// ϑ(θ) = cos[vπ(1/2 − θ/β)].
pub fn theta_factor(params: &ModelParams, theta: ComplexTime) -> Complex64 {
    let arg = (Complex64::new(0.5, 0.0) - theta.0 / params.beta()) * (PI * params.v());
    arg.cos()
}

fn on_branch_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 || !z.re.is_finite() || !z.im.is_finite()
}

/// Principal-branch z^(-a), refusing arguments on the cut.
pub(crate) fn inv_pow(z: Complex64, a: f64, what: &str) -> Result<Complex64> {
    if on_branch_cut(z) {
        return Err(Error::Domain(format!("{what}: argument {z} lies on the branch cut")));
    }
    Ok(z.powf(-a))
}

/// Imaginary-time two-point function G(θ) = ½(cos(πv/2)/ϑ)^{2Δ}.
pub fn two_point_g(params: &ModelParams, theta: ComplexTime) -> Result<Complex64> {
    let vt = theta_factor(params, theta);
    let c = params.cos_half_pi_v();
    Ok(0.5 * c.powf(2.0 * params.delta()) * inv_pow(vt, 2.0 * params.delta(), "two_point_g")?)
}

/// The family `norm · y^(shape-1) · e^(-rate·y)` on y ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaKernel {
    pub shape: f64,
    pub rate: Complex64,
    pub norm: Complex64,
}

impl GammaKernel {
    pub fn new(shape: f64, rate: Complex64, norm: Complex64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::Argument(format!("kernel shape must be positive, got {shape}")));
        }
        if !(rate.re > 0.0) {
            return Err(Error::Domain(format!(
                "kernel rate {rate} must have positive real part"
            )));
        }
        Ok(Self { shape, rate, norm })
    }

    /// Pointwise density h(y).
    pub fn density(&self, y: f64) -> Complex64 {
        if y <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.norm * y.powf(self.shape - 1.0) * (-self.rate * y).exp()
    }

    /// f(x) = ∫₀^∞ h(y) e^{-xy} dy = norm·Γ(shape)/(rate + x)^shape.
    ///
    /// For Re(rate + x) ≤ 0 the integral diverges and the closed form is
    /// its analytic continuation; only the branch cut itself is rejected.
    pub fn laplace(&self, x: Complex64) -> Result<Complex64> {
        Ok(self.norm * gamma(self.shape) * inv_pow(self.rate + x, self.shape, "laplace")?)
    }

    /// Υ^m = ∫₀^∞ y^m h(y) dy.
    pub fn moment(&self, m: u32) -> Result<Complex64> {
        let s = self.shape + m as f64;
        Ok(self.norm * gamma(s) * inv_pow(self.rate, s, "moment")?)
    }

    /// Total mass, the m = 0 moment.
    pub fn mass(&self) -> Result<Complex64> {
        self.moment(0)
    }
}

/// Convolution h₁ * h₂ of two kernels sharing a rate; its Laplace transform
/// is the product of the two.
pub fn compose(k1: &GammaKernel, k2: &GammaKernel) -> Result<GammaKernel> {
    let scale = k1.rate.norm().max(k2.rate.norm());
    if (k1.rate - k2.rate).norm() > RATE_MATCH_TOL * scale {
        return Err(Error::RateMismatch { left: k1.rate, right: k2.rate });
    }
    Ok(GammaKernel {
        shape: k1.shape + k2.shape,
        rate: k1.rate,
        norm: k1.norm * k2.norm * beta(k1.shape, k2.shape),
    })
}

/// Kernel of a string of `encode_len` Majoranas, whose probe function is
/// 2^{𝓔−1}·f^𝓔. `encode_len = 1` is the single-fermion kernel.
pub fn string_kernel(
    params: &ModelParams,
    theta: ComplexTime,
    encode_len: u32,
) -> Result<GammaKernel> {
    if encode_len == 0 || encode_len % 2 == 0 {
        return Err(Error::Argument(format!(
            "encoding length must be a positive odd integer, got {encode_len}"
        )));
    }
    let shape = 2.0 * params.delta() * encode_len as f64;
    let rate = theta_factor(params, theta);
    if !(rate.re > 0.0) {
        return Err(Error::Domain(format!("ϑ(θ) = {rate} has non-positive real part")));
    }
    let norm = params.cos_half_pi_v().powf(shape) / (2.0 * gamma(shape));
    GammaKernel::new(shape, rate, Complex64::new(norm, 0.0))
}

/// h^A(y, θ) = (cos πv/2)^{2Δ}/(2Γ(2Δ)) · y^{2Δ−1} e^{−ϑy}.
pub fn base_kernel(params: &ModelParams, theta: ComplexTime) -> Result<GammaKernel> {
    string_kernel(params, theta, 1)
}

/// Norms of the scramblon propagator for a given insertion schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScramblonWeights {
    /// e^{κ(t_L+t_R)/2}/C
    pub lambda0: f64,
    /// e^{κ t_L}/C
    pub lambda1: f64,
    /// e^{−iκβ/4}
    pub phase: Complex64,
}

pub fn scramblon_weights(params: &ModelParams, t_l: f64, t_r: f64) -> Result<ScramblonWeights> {
    let c = params.c_prefactor().ok_or(Error::InfiniteN)?;
    let k = params.kappa();
    Ok(ScramblonWeights {
        lambda0: (0.5 * k * (t_l + t_r)).exp() / c,
        lambda1: (k * t_l).exp() / c,
        phase: params.scramblon_phase(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(v: f64, n: u64) -> ModelParams {
        ModelParams::syk4(v, SystemSize::Finite(n)).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn params_relations() {
        let m = p(0.95, 1000);
        assert_eq!(m.delta(), 0.25);
        let bj = m.j_coupling() * m.beta();
        assert!((bj - PI * 0.95 / (PI * 0.475).cos()).abs() < 1e-12);
        assert!((m.kappa() - 2.0 * PI * 0.95).abs() < 1e-14);
        let cc = m.c_prefactor().unwrap();
        assert!((cc - 4.0 * 0.0625 * 1000.0 * (0.475 * PI).cos()).abs() < 1e-10);
        assert!((cc - 19.6148).abs() < 1e-3);
        assert!(ModelParams::syk4(0.95, SystemSize::Infinite).unwrap().c_prefactor().is_none());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(3, 0.5, 1.0, SystemSize::Infinite).is_err());
        assert!(ModelParams::new(2, 0.5, 1.0, SystemSize::Infinite).is_err());
        assert!(ModelParams::new(4, 1.0, 1.0, SystemSize::Infinite).is_err());
        assert!(ModelParams::new(4, 0.5, 0.0, SystemSize::Infinite).is_err());
        assert!(ModelParams::new(6, 0.5, 2.0, SystemSize::Finite(10)).is_ok());
    }

    #[test]
    fn system_size_parse_and_display() {
        assert_eq!("inf".parse::<SystemSize>().unwrap(), SystemSize::Infinite);
        assert_eq!("100".parse::<SystemSize>().unwrap(), SystemSize::Finite(100));
        assert!("0".parse::<SystemSize>().is_err());
        assert!("-3".parse::<SystemSize>().is_err());
        assert_eq!(SystemSize::Infinite.to_string(), "inf");
        let js: Vec<SystemSize> = serde_json::from_str(r#"[10, "inf"]"#).unwrap();
        assert_eq!(js, vec![SystemSize::Finite(10), SystemSize::Infinite]);
        assert_eq!(serde_json::to_string(&js).unwrap(), r#"[10,"inf"]"#);
    }

    #[test]
    fn theta_factor_values() {
        let m = p(0.95, 1000);
        let half = theta_factor(&m, ComplexTime::half_beta(&m, 0.0));
        assert!((half - c(1.0, 0.0)).norm() < 1e-15);
        let zero = theta_factor(&m, ComplexTime::zero());
        assert!((zero.re - 0.0784591).abs() < 1e-7 && zero.im == 0.0);
        for &t in &[-2.0, -0.3, 0.0, 0.7, 3.0] {
            let z = theta_factor(&m, ComplexTime::half_beta(&m, t));
            let expect = (PI * 0.95 * t).cosh();
            assert!((z.re - expect).abs() < 1e-12 * expect);
            assert!(z.im.abs() < 1e-12 * expect);
            assert!(z.re >= 1.0);
        }
    }

    #[test]
    fn two_point_function_values() {
        let m = p(0.95, 1000);
        let g = two_point_g(&m, ComplexTime::half_beta(&m, 0.0)).unwrap();
        assert!((g.re - 0.5 * 0.0784591_f64.sqrt()).abs() < 1e-7);
        assert!((g.re - 0.140053).abs() < 1e-6);
        let g0 = two_point_g(&m, ComplexTime::zero()).unwrap();
        assert!((g0 - c(0.5, 0.0)).norm() < 1e-15);
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let t = 0.1 * i as f64;
            let g = two_point_g(&m, ComplexTime::half_beta(&m, t)).unwrap();
            let gm = two_point_g(&m, ComplexTime::half_beta(&m, -t)).unwrap();
            assert!(g.im.abs() < 1e-15);
            assert!((g - gm).norm() < 1e-15);
            assert!(g.re < last || i == 0);
            last = g.re;
        }
    }

    #[test]
    fn branch_cut_rejected() {
        let k = GammaKernel::new(0.5, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(k.laplace(c(-1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(k.laplace(c(-3.0, 0.0)), Err(Error::Domain(_))));
        // off the cut the continuation is returned
        assert!(k.laplace(c(-3.0, 0.1)).is_ok());
        assert!(GammaKernel::new(0.5, c(-1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn base_kernel_values() {
        let m = p(0.95, 1000);
        let th = ComplexTime::half_beta(&m, 0.0);
        let k = base_kernel(&m, th).unwrap();
        assert_eq!(k.shape, 0.5);
        assert!((k.rate - c(1.0, 0.0)).norm() < 1e-15);
        // independent evaluation: sqrt(cos(0.475π))/(2√π)
        assert!((k.norm.re - 0.079_016_305_012_341_41).abs() < 1e-13);
        let g = two_point_g(&m, th).unwrap();
        assert!(rel(k.laplace(c(0.0, 0.0)).unwrap(), g) < 1e-14);
        assert!(rel(k.moment(0).unwrap(), g) < 1e-14);
        let kk = compose(&k, &k).unwrap();
        assert_eq!(kk.shape, 1.0);
    }

    #[test]
    fn first_moment_value() {
        let m = p(0.95, 1000);
        let k = base_kernel(&m, ComplexTime::half_beta(&m, 0.0)).unwrap();
        let u1 = k.moment(1).unwrap();
        assert!((u1.re - 0.25 * 0.0784591_f64.sqrt()).abs() < 1e-7);
        assert!((u1.re - 0.070_026_377_051_724_68).abs() < 1e-13);
    }

    #[test]
    fn laplace_power_law_tail() {
        let m = p(0.95, 1000);
        let k = base_kernel(&m, ComplexTime::half_beta(&m, 0.4)).unwrap();
        let a = k.laplace(c(1e6, 0.0)).unwrap().norm();
        let b = k.laplace(c(4e6, 0.0)).unwrap().norm();
        // |f| ~ x^{-2Δ}: quadrupling x halves |f| for Δ = 1/4
        assert!((a / b - 2.0).abs() < 1e-5);
    }

    #[test]
    fn string_kernel_cases() {
        let m = p(0.95, 1000);
        let th = ComplexTime::half_beta(&m, 0.3);
        assert_eq!(string_kernel(&m, th, 1).unwrap(), base_kernel(&m, th).unwrap());
        let k3 = string_kernel(&m, th, 3).unwrap();
        assert!((k3.shape - 1.5).abs() < 1e-15);
        let vt = theta_factor(&m, th);
        let expect = 0.5 * (m.cos_half_pi_v() / vt).powf(1.5);
        assert!(rel(k3.laplace(c(0.0, 0.0)).unwrap(), expect) < 1e-13);
        assert!(string_kernel(&m, th, 2).is_err());
        assert!(string_kernel(&m, th, 0).is_err());
        let k1 = base_kernel(&m, th).unwrap();
        // 2𝓔 legs with 𝓔 = 3 give shape 4Δ𝓔
        let mut k = k1;
        for _ in 1..6 {
            k = compose(&k, &k1).unwrap();
        }
        assert!((k.shape - 4.0 * 0.25 * 3.0).abs() < 1e-15);
    }

    #[test]
    fn rate_mismatch() {
        let m = p(0.95, 1000);
        let a = base_kernel(&m, ComplexTime::half_beta(&m, 0.0)).unwrap();
        let b = base_kernel(&m, ComplexTime::half_beta(&m, 0.5)).unwrap();
        assert!(matches!(compose(&a, &b), Err(Error::RateMismatch { .. })));
    }

    #[test]
    fn weights() {
        let m = p(0.95, 1000);
        let w = scramblon_weights(&m, 0.0, 0.0).unwrap();
        assert!((w.lambda0 - 0.0509819).abs() < 1e-6);
        assert_eq!(w.lambda0, w.lambda1);
        let w = scramblon_weights(&m, 1.3, 1.3).unwrap();
        assert!((w.lambda0 - w.lambda1).abs() < 1e-15 * w.lambda0);
        assert!((w.phase - Complex64::from_polar(1.0, -0.475 * PI)).norm() < 1e-15);
        let inf = m.with_size(SystemSize::Infinite);
        assert!(matches!(scramblon_weights(&inf, 0.0, 0.0), Err(Error::InfiniteN)));
    }

    #[test]
    fn n_lambda0_is_size_free() {
        let a = p(0.95, 100);
        let b = p(0.95, 100_000);
        let wa = scramblon_weights(&a, 0.4, 0.2).unwrap();
        let wb = scramblon_weights(&b, 0.4, 0.2).unwrap();
        assert!((100.0 * wa.lambda0 - a.n_lambda0(0.4, 0.2)).abs() < 1e-12);
        assert!((1e5 * wb.lambda0 - a.n_lambda0(0.4, 0.2)).abs() < 1e-10);
    }

    /// Finite-difference derivative oracle: Υ^m = (−1)^m dᵐf/dxᵐ at 0.
    /// Central differences of the Laplace transform at 0, with steps scaled
    /// to |rate| and Richardson-extrapolated in h².
    fn fd_derivative(k: &GammaKernel, m: u32) -> Complex64 {
        let f = |x: f64| k.laplace(c(x, 0.0)).unwrap();
        let stencil = |h: f64| match m {
            1 => (f(h) - f(-h)) / (2.0 * h),
            2 => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
            3 => (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h),
            _ => unreachable!(),
        };
        let h0 = 0.05 * k.rate.norm();
        let mut table: Vec<Complex64> = (0..4).map(|j| stencil(h0 / 2f64.powi(j))).collect();
        for level in 1..table.len() {
            let factor = 4f64.powi(level as i32);
            for j in (level..table.len()).rev() {
                table[j] = (factor * table[j] - table[j - 1]) / (factor - 1.0);
            }
        }
        table[table.len() - 1]
    }

    proptest! {
        #[test]
        fn moment_derivative_duality(v in 0.05f64..0.99, t in -1.0f64..1.0, e in 0usize..3) {
            let m = p(v, 1000);
            let enc = [1u32, 3, 5][e];
            let k = string_kernel(&m, ComplexTime::half_beta(&m, t), enc).unwrap();
            for order in 1..=3u32 {
                let fd = fd_derivative(&k, order) * if order % 2 == 1 { -1.0 } else { 1.0 };
                let mo = k.moment(order).unwrap();
                prop_assert!(rel(fd, mo) < 1e-6, "m={} fd={} moment={}", order, fd, mo);
            }
        }

        #[test]
        fn composition_associative(
            a in 0.1f64..3.0, b in 0.1f64..3.0, cc in 0.1f64..3.0,
            rr in 0.2f64..5.0, ri in -2.0f64..2.0,
        ) {
            let rate = c(rr, ri);
            let k1 = GammaKernel::new(a, rate, c(1.3, 0.2)).unwrap();
            let k2 = GammaKernel::new(b, rate, c(0.7, -0.1)).unwrap();
            let k3 = GammaKernel::new(cc, rate, c(2.0, 0.0)).unwrap();
            let l = compose(&compose(&k1, &k2).unwrap(), &k3).unwrap();
            let r = compose(&k1, &compose(&k2, &k3).unwrap()).unwrap();
            prop_assert!((l.shape - r.shape).abs() <= 1e-12 * l.shape);
            prop_assert!(rel(l.norm, r.norm) < 1e-12);
            prop_assert_eq!(l.rate, r.rate);
        }

        #[test]
        fn composition_is_product(v in 0.05f64..0.99, t in -1.0f64..1.0,
                                  xr in -0.5f64..10.0, xi in -10.0f64..10.0) {
            let m = p(v, 1000);
            let k = base_kernel(&m, ComplexTime::half_beta(&m, t)).unwrap();
            let x = c(xr, xi);
            let kk = compose(&k, &k).unwrap();
            let f = k.laplace(x).unwrap();
            prop_assert!(rel(kk.laplace(x).unwrap(), f * f) < 1e-12);
        }

        #[test]
        fn string_kernel_is_power_of_base(v in 0.05f64..0.99, t in -1.0f64..1.0,
                                          e in 0usize..4, xr in 0.0f64..20.0, xi in -20.0f64..20.0) {
            let m = p(v, 1000);
            let enc = [1u32, 3, 5, 7][e];
            let th = ComplexTime::half_beta(&m, t);
            let x = c(xr, xi);
            let f = base_kernel(&m, th).unwrap().laplace(x).unwrap();
            let fs = string_kernel(&m, th, enc).unwrap().laplace(x).unwrap();
            let expect = 2f64.powi(enc as i32 - 1) * f.powu(enc);
            prop_assert!(rel(fs, expect) < 1e-10);
        }

        #[test]
        fn branch_safety_on_coupling_legs(v in 0.01f64..0.999, lam in 0.0f64..1e12, y in 0.0f64..1e3) {
            let m = p(v, 1000);
            let vt = theta_factor(&m, ComplexTime::half_beta(&m, 0.0));
            let x = m.scramblon_phase() * lam * y;
            prop_assert!((vt + x).re > 0.0);
        }
    }
}
