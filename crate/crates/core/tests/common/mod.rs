//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use scramblon::model::GammaKernel;

/// (h₁ * h₂)(y) = ∫₀^y h₁(s)h₂(y−s) ds on a uniform grid of `nodes` points
/// in τ, with s = y·u and u = 1/(1 + e^{−π sinh τ}) absorbing both endpoint
/// singularities.
pub fn brute_convolution(k1: &GammaKernel, k2: &GammaKernel, y: f64, nodes: usize) -> Complex64 {
    let half_width = 4.0_f64;
    let dtau = 2.0 * half_width / (nodes - 1) as f64;
    (0..nodes)
        .map(|j| {
            let tau = -half_width + j as f64 * dtau;
            let z = std::f64::consts::PI * tau.sinh();
            let u = 1.0 / (1.0 + (-z).exp());
            let w = 1.0 / (1.0 + z.exp());
            let jac = std::f64::consts::PI * tau.cosh() * u * w * y;
            k1.density(y * u) * k2.density(y * w) * jac
        })
        .sum::<Complex64>()
        * dtau
}

/// ∫₀^∞ h(y)·g(y) dy by the midpoint rule on y = e^u, u ∈ [−200, 8].
pub fn brute_integral<G: Fn(f64) -> Complex64>(k: &GammaKernel, g: G, nodes: usize) -> Complex64 {
    let (lo, hi) = (-200.0_f64, 8.0_f64);
    let du = (hi - lo) / nodes as f64;
    (0..nodes)
        .map(|j| {
            let y = (lo + (j as f64 + 0.5) * du).exp();
            k.density(y) * g(y) * y
        })
        .sum::<Complex64>()
        * du
}

/// m-th derivative at 0 by Richardson-extrapolated central differences.
pub fn derivative_at_zero<F: Fn(f64) -> Complex64>(f: F, m: u32) -> Complex64 {
    let stencil = |h: f64| match m {
        1 => (f(h) - f(-h)) / (2.0 * h),
        2 => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
        _ => unimplemented!("only first and second derivatives"),
    };
    let mut table: Vec<Complex64> = (0..5).map(|k| stencil(0.02 / 2f64.powi(k))).collect();
    for level in 1..table.len() {
        let factor = 4f64.powi(level as i32);
        for k in (level..table.len()).rev() {
            table[k] = (factor * table[k] - table[k - 1]) / (factor - 1.0);
        }
    }
    *table.last().unwrap()
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
