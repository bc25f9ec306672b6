//! Integrals of gamma kernels against bounded weights on [0, ∞).
//!
//! Two rules are available:
//!
//! * [`Rule::LogTrapezoid`] substitutes `u = Re(ϑ)·y = e^s` and applies the
//!   trapezoid rule in `s`. The integrand is analytic in a strip around the
//!   real `s` axis, so the error falls off like `exp(-π²/h)`. Features of the
//!   weight sitting at any scale `y ~ 1/λ` are resolved with the same
//!   density of nodes per decade, which is what the correlator weights
//!   `exp(iμN f(λy))` need once `λ` grows past the Laguerre node spacing.
//! * [`Rule::Laguerre`] is generalized Gauss–Laguerre with exponent
//!   `shape − 1`, nodes from Golub–Welsch. It is exact for polynomial
//!   weights and fast for slowly varying ones.
//!
//! Both refine by doubling the node count until two successive values agree
//! to `rel_tol·|value| + abs_floor`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GammaKernel;
use crate::special::{gamma, ln_gamma};

/// Relative kernel mass discarded at each end of the log-trapezoid range.
const TAIL_EPS: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    #[default]
    LogTrapezoid,
    Laguerre,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Nodes per axis at the first level.
    pub node_count: usize,
    /// Maximum number of doublings after the first level.
    pub refinement_limit: u32,
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub rule: Rule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            node_count: 64,
            refinement_limit: 5,
            rel_tol: 1e-10,
            abs_floor: 1e-14,
            rule: Rule::LogTrapezoid,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::Argument(format!(
                "node_count must be at least 8, got {}",
                self.node_count
            )));
        }
        if self.refinement_limit < 1 {
            return Err(Error::Argument("refinement_limit must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::Argument(format!(
                "rel_tol must lie in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_floor > 0.0) {
            return Err(Error::Argument("abs_floor must be positive".into()));
        }
        Ok(())
    }

    pub fn with_rule(self, rule: Rule) -> Self {
        Self { rule, ..self }
    }

    fn converged(&self, value: Complex64, err: f64) -> bool {
        err <= self.rel_tol * value.norm() + self.abs_floor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    /// |value − value at the previous level|
    pub err_estimate: f64,
    /// Integrand evaluations at the final level.
    pub nodes_used: usize,
}

// ---------------------------------------------------------------------------
// Gauss–Laguerre via Golub–Welsch

type Rule1d = Arc<(Vec<f64>, Vec<f64>)>;

fn laguerre_cache() -> &'static Mutex<HashMap<(u64, usize), Rule1d>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Rule1d>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Nodes and weights of the n-point rule for ∫₀^∞ u^a e^{-u} g(u) du.
pub fn gauss_laguerre(n: usize, a: f64) -> Result<Rule1d> {
    if n == 0 || !(a > -1.0) {
        return Err(Error::Argument(format!("invalid Laguerre rule n = {n}, a = {a}")));
    }
    let key = (a.to_bits(), n);
    if let Some(r) = laguerre_cache().lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    // Jacobi matrix of the monic generalized Laguerre recurrence
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + a)).sqrt()).collect();
    let (nodes, first) = tridiagonal_eigen_first_row(diag, off)?;
    let mu0 = gamma(a + 1.0);
    let mut pairs: Vec<(f64, f64)> =
        nodes.into_iter().zip(first).map(|(x, z)| (x, mu0 * z * z)).collect();
    pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
    let rule = Arc::new(pairs.into_iter().unzip());
    laguerre_cache().lock().unwrap().insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix,
/// tracking only the first component of each eigenvector.
fn tridiagonal_eigen_first_row(mut d: Vec<f64>, off: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut e = off;
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Domain("Golub-Welsch eigen iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

// ---------------------------------------------------------------------------
// Node sets for a kernel

/// Quadrature nodes `y_i` and complex weights `W_i` such that
/// ∫ h(y) w(y) dy ≈ Σ W_i w(y_i).
#[derive(Debug, Clone)]
struct NodeSet {
    y: Vec<f64>,
    w: Vec<Complex64>,
    /// Whether the node belongs to the previous (coarser) level.
    inherited: Vec<bool>,
    /// Scale applied to the previous level's weighted sum to obtain its
    /// contribution at this level (1/2 per axis for nested trapezoid).
    nested: bool,
}

/// Truncated `s = ln u` range for the measure u^{α−1}e^{−u}.
fn log_range(shape: f64) -> (f64, f64) {
    // mass below u_lo is u_lo^α/(αΓ(α))
    let s_lo = (TAIL_EPS * shape).ln() / shape + ln_gamma(shape) / shape;
    let target = TAIL_EPS.ln() + ln_gamma(shape);
    let mut u: f64 = 1.0 + shape;
    for _ in 0..50 {
        // u^α e^{-u} = e^{target}
        u = shape * u.max(1.0).ln() - target;
    }
    (s_lo, u.max(shape + 1.0).ln())
}

fn kernel_prefactor(k: &GammaKernel) -> Result<(f64, Complex64)> {
    let vr = k.rate.re;
    if !(vr > 0.0) {
        return Err(Error::Domain(format!("kernel rate {} must have positive real part", k.rate)));
    }
    Ok((vr, k.norm * vr.powf(-k.shape)))
}

fn log_trapezoid_nodes(k: &GammaKernel, intervals0: usize, level: u32) -> Result<NodeSet> {
    let (vr, pre) = kernel_prefactor(k)?;
    let (s_lo, s_hi) = log_range(k.shape);
    let m = intervals0 << level;
    let h = (s_hi - s_lo) / m as f64;
    let ratio = k.rate / vr;
    let mut set = NodeSet {
        y: Vec::with_capacity(m + 1),
        w: Vec::with_capacity(m + 1),
        inherited: Vec::with_capacity(m + 1),
        nested: true,
    };
    for i in 0..=m {
        let s = s_lo + i as f64 * h;
        let u = s.exp();
        let log_mag = k.shape * s;
        let w = pre * h * (Complex64::new(log_mag, 0.0) - ratio * u).exp();
        set.y.push(u / vr);
        set.w.push(w);
        set.inherited.push(level > 0 && i % 2 == 0);
    }
    Ok(set)
}

fn laguerre_nodes(k: &GammaKernel, n0: usize, level: u32) -> Result<NodeSet> {
    let (vr, pre) = kernel_prefactor(k)?;
    let n = n0 << level;
    let rule = gauss_laguerre(n, k.shape - 1.0)?;
    let (nodes, weights) = (&rule.0, &rule.1);
    let im = Complex64::new(0.0, -k.rate.im / vr);
    Ok(NodeSet {
        y: nodes.iter().map(|u| u / vr).collect(),
        w: nodes.iter().zip(weights).map(|(u, w)| pre * *w * (im * *u).exp()).collect(),
        inherited: vec![false; n],
        nested: false,
    })
}

fn nodes_for(k: &GammaKernel, spec: &QuadratureSpec, level: u32) -> Result<NodeSet> {
    match spec.rule {
        Rule::LogTrapezoid => log_trapezoid_nodes(k, spec.node_count, level),
        Rule::Laguerre => laguerre_nodes(k, spec.node_count, level),
    }
}

// ---------------------------------------------------------------------------
// Drivers

/// Successive refinement values of ∫ h(y) w(y) dy, one per level, stopping
/// after convergence or at the refinement limit.
pub fn refinement_sequence<W>(
    kernel: &GammaKernel,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<Vec<(Complex64, usize)>>
where
    W: Fn(f64) -> Complex64,
{
    spec.validate()?;
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    let mut raw_prev = Complex64::new(0.0, 0.0);
    for level in 0..=spec.refinement_limit {
        let set = nodes_for(kernel, spec, level)?;
        let mut raw = if set.nested { raw_prev * 0.5 } else { Complex64::new(0.0, 0.0) };
        for i in 0..set.y.len() {
            if set.nested && set.inherited[i] {
                continue;
            }
            raw += set.w[i] * weight(set.y[i]);
        }
        raw_prev = raw;
        if !raw.re.is_finite() || !raw.im.is_finite() {
            return Err(Error::Domain(format!("non-finite integrand sum at level {level}")));
        }
        out.push((raw, set.y.len()));
        if let [.., (a, _), (b, _)] = out.as_slice() {
            if spec.converged(*b, (*b - *a).norm()) {
                break;
            }
        }
    }
    Ok(out)
}

fn finish(seq: &[(Complex64, usize)], spec: &QuadratureSpec) -> Result<QuadResult> {
    let (value, nodes_used) = *seq.last().expect("at least one level");
    let err_estimate = match seq {
        [.., (a, _), (b, _)] => (*b - *a).norm(),
        _ => f64::INFINITY,
    };
    let res = QuadResult { value, err_estimate, nodes_used };
    if spec.converged(value, err_estimate) {
        Ok(res)
    } else {
        Err(Error::NoConvergence(res))
    }
}

/// ∫₀^∞ kernel(y)·weight(y) dy.
pub fn integrate_1d<W>(kernel: &GammaKernel, weight: W, spec: &QuadratureSpec) -> Result<QuadResult>
where
    W: Fn(f64) -> Complex64,
{
    let seq = refinement_sequence(kernel, weight, spec)?;
    finish(&seq, spec)
}

/// ∫₀^∞∫₀^∞ k1(y₁)·k2(y₂)·weight(y₁, y₂) dy₁dy₂ on a tensor-product grid,
/// refining both axes together.
pub fn integrate_2d<W>(
    k1: &GammaKernel,
    k2: &GammaKernel,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<QuadResult>
where
    W: Fn(f64, f64) -> Complex64,
{
    integrate_2d_with(k1, k2, |y2| y2, |y1, y2: &f64| weight(y1, *y2), spec)
}

/// As [`integrate_2d`], with `prepare(y₂)` evaluated once per y₂ node and
/// handed to `weight` in place of y₂.
pub fn integrate_2d_with<A, P, W>(
    k1: &GammaKernel,
    k2: &GammaKernel,
    prepare: P,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<QuadResult>
where
    P: Fn(f64) -> A,
    W: Fn(f64, &A) -> Complex64,
{
    spec.validate()?;
    let mut seq: Vec<(Complex64, usize)> = Vec::new();
    let mut raw_prev = Complex64::new(0.0, 0.0);
    for level in 0..=spec.refinement_limit {
        let a = nodes_for(k1, spec, level)?;
        let b = nodes_for(k2, spec, level)?;
        let aux: Vec<A> = b.y.iter().map(|&y| prepare(y)).collect();
        let nested = a.nested && b.nested;
        let mut raw = if nested { raw_prev * 0.25 } else { Complex64::new(0.0, 0.0) };
        for i in 0..a.y.len() {
            let (yi, wi, old_i) = (a.y[i], a.w[i], a.inherited[i]);
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..b.y.len() {
                if nested && old_i && b.inherited[j] {
                    continue;
                }
                row += b.w[j] * weight(yi, &aux[j]);
            }
            raw += wi * row;
        }
        raw_prev = raw;
        if !raw.re.is_finite() || !raw.im.is_finite() {
            return Err(Error::Domain(format!("non-finite integrand sum at level {level}")));
        }
        seq.push((raw, a.y.len() * b.y.len()));
        if let [.., (p, _), (q, _)] = seq.as_slice() {
            if spec.converged(*q, (*q - *p).norm()) {
                break;
            }
        }
    }
    finish(&seq, spec)
}
