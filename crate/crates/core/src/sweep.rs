//! Parameter sweeps over (N, μ, 𝓔, t_L, t_R).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::thread;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::{evaluate, CorrelatorSet, EvalOptions, ProtocolPoint};
use crate::density::{from_correlators, CLAMP_TOL};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SystemSize};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_q")]
    pub q: u32,
    pub v: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: Vec<SystemSize>,
}

fn default_q() -> u32 {
    4
}

fn default_beta() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub mu: Vec<f64>,
    #[serde(default = "default_encode")]
    pub encode_len: Vec<u32>,
    /// Use the saturated closed forms once κ(t_L+t_R)/2 ≥ 25.
    #[serde(default)]
    pub long_time_fast_path: bool,
}

fn default_encode() -> Vec<u32> {
    vec![1]
}

/// `count` evenly spaced points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config(format!("{name}: count must be at least 1")));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min < 0.0 {
            return Err(Error::Config(format!("{name}: bounds must be finite and non-negative")));
        }
        if self.count > 1 && !(self.max > self.min) {
            return Err(Error::Config(format!("{name}: max must exceed min when count > 1")));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.count - 1) as f64;
        (0..self.count).map(|k| self.min + span * k as f64 / last).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_l: Range,
    /// Required unless `diagonal` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_r: Option<Range>,
    /// Evaluate only t_R = t_L.
    #[serde(default)]
    pub diagonal: bool,
}

impl GridSection {
    fn validate(&self) -> Result<()> {
        self.t_l.validate("grid.t_l")?;
        match (&self.t_r, self.diagonal) {
            (Some(_), true) => Err(Error::Config("grid: give either t_r or diagonal = true, not both".into())),
            (None, false) => Err(Error::Config("grid: t_r is required unless diagonal = true".into())),
            (Some(r), false) => r.validate("grid.t_r"),
            (None, true) => Ok(()),
        }
    }

    /// (t_L, t_R) pairs, t_L major.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        let tl = self.t_l.points();
        match (&self.t_r, self.diagonal) {
            (_, true) => tl.iter().map(|&t| (t, t)).collect(),
            (Some(r), false) => {
                let tr = r.points();
                tl.iter().flat_map(|&a| tr.iter().map(move |&b| (a, b))).collect()
            }
            (None, false) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Config(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Format,
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub units: Units,
}

/// Worker count: a positive integer or `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threads {
    #[default]
    Auto,
    Count(usize),
}

impl Threads {
    pub fn resolve(self) -> usize {
        match self {
            Self::Count(n) => n.max(1),
            Self::Auto => thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

impl fmt::Display for Threads {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::Count(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Threads {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Self::Count(n)),
            _ => Err(Error::Config(format!("threads must be a positive integer or \"auto\", got {s:?}"))),
        }
    }
}

impl Serialize for Threads {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Auto => s.serialize_str("auto"),
            Self::Count(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Threads {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(i64),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(n) if n >= 1 => Ok(Self::Count(n as usize)),
            Repr::Count(n) => Err(serde::de::Error::custom(format!("threads must be positive, got {n}"))),
            Repr::Word(w) => w.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelSection,
    pub protocol: ProtocolSection,
    pub grid: GridSection,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub threads: Threads,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        if self.model.n.is_empty() {
            return Err(Error::Config("model.N must list at least one size".into()));
        }
        for &n in &self.model.n {
            ModelParams::new(self.model.q, self.model.v, self.model.beta, n).map_err(as_config)?;
        }
        if self.protocol.mu.is_empty() || self.protocol.encode_len.is_empty() {
            return Err(Error::Config("protocol.mu and protocol.encode_len must be non-empty".into()));
        }
        for &mu in &self.protocol.mu {
            for &e in &self.protocol.encode_len {
                ProtocolPoint::new(0.0, 0.0, mu, e).map_err(as_config)?;
            }
        }
        self.grid.validate()?;
        self.quadrature.validate().map_err(as_config)?;
        Ok(())
    }

    /// Grid points in output order: N, μ, 𝓔, t_L, t_R, each varying
    /// slowest to fastest in the order listed in the configuration.
    pub fn points(&self) -> Vec<(SystemSize, ProtocolPoint)> {
        let pairs = self.grid.pairs();
        let mut out = Vec::new();
        for &n in &self.model.n {
            for &mu in &self.protocol.mu {
                for &e in &self.protocol.encode_len {
                    for &(t_l, t_r) in &pairs {
                        out.push((n, ProtocolPoint { t_l, t_r, mu, encode_len: e }));
                    }
                }
            }
        }
        out
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions { quadrature: self.quadrature, long_time_fast_path: self.protocol.long_time_fast_path }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// Eigenvalues within the clamp band were set to zero.
    Clamped,
    NonPhysical,
    NoConvergence,
    Failed,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::Clamped => "clamped",
            Self::NonPhysical => "non_physical",
            Self::NoConvergence => "no_convergence",
            Self::Failed => "failed",
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Self::Ok | Self::Clamped)
    }
}

impl FromStr for RowStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::Ok, Self::Clamped, Self::NonPhysical, Self::NoConvergence, Self::Failed]
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown status {s:?}")))
    }
}

/// One grid point. Quantities that could not be computed are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t_l: f64,
    pub t_r: f64,
    pub mu: f64,
    pub n: SystemSize,
    pub encode_len: u32,
    pub i: [Complex64; 4],
    pub err: [f64; 4],
    pub rho2: f64,
    pub rho4: f64,
    pub mutual_info: f64,
    pub negativity: f64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.status.is_success()).count()
    }

    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.failed_rows() == self.rows.len()
    }
}

fn nan_c() -> Complex64 {
    Complex64::new(f64::NAN, f64::NAN)
}

/// Evaluates one grid point; failures are reported in the status column.
pub fn evaluate_row(params: &ModelParams, pt: &ProtocolPoint, opts: &EvalOptions, units: Units) -> SweepRow {
    let mut row = SweepRow {
        t_l: pt.t_l,
        t_r: pt.t_r,
        mu: pt.mu,
        n: params.n_majorana(),
        encode_len: pt.encode_len,
        i: [nan_c(); 4],
        err: [f64::NAN; 4],
        rho2: f64::NAN,
        rho4: f64::NAN,
        mutual_info: f64::NAN,
        negativity: f64::NAN,
        status: RowStatus::Failed,
    };
    let cs: CorrelatorSet = match evaluate(params, pt, opts) {
        Ok(cs) => cs,
        Err(Error::NoConvergence(_)) => {
            row.status = RowStatus::NoConvergence;
            return row;
        }
        Err(_) => return row,
    };
    row.i = [cs.i1, cs.i2, cs.i3, cs.i4];
    row.err = [cs.err1, cs.err2, cs.err3, cs.err4];
    let (rho2, rho4) = crate::density::coefficients_from_correlators(&cs);
    row.rho2 = rho2;
    row.rho4 = rho4;
    match from_correlators(&cs, CLAMP_TOL) {
        Ok((_, _, m)) => {
            let m = if units == Units::Bits { m.in_bits() } else { m };
            row.mutual_info = m.mutual_info;
            row.negativity = m.negativity;
            row.status = if m.clamp_report.is_empty() { RowStatus::Ok } else { RowStatus::Clamped };
        }
        Err(Error::NonPhysicalState { .. }) => row.status = RowStatus::NonPhysical,
        Err(_) => row.status = RowStatus::Failed,
    }
    row
}

/// Evaluates every grid point. Rows are assigned to workers round-robin
/// and written back by index, so the result does not depend on `threads`.
pub fn run_sweep_with_threads(config: &SweepConfig, threads: usize) -> Result<SweepResult> {
    config.validate()?;
    let points = config.points();
    let opts = config.eval_options();
    let units = config.output.units;
    let models: Vec<(SystemSize, ModelParams)> = config
        .model
        .n
        .iter()
        .map(|&n| ModelParams::new(config.model.q, config.model.v, config.model.beta, n).map(|m| (n, m)))
        .collect::<Result<_>>()?;
    let model_for = |n: SystemSize| models.iter().find(|(k, _)| *k == n).expect("validated").1;

    let workers = threads.clamp(1, points.len().max(1));
    let mut slots: Vec<Option<SweepRow>> = vec![None; points.len()];
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let points = &points;
                let opts = &opts;
                let model_for = &model_for;
                s.spawn(move || {
                    points
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(idx, (n, pt))| (idx, evaluate_row(&model_for(*n), pt, opts, units)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (idx, row) in h.join().expect("sweep worker panicked") {
                slots[idx] = Some(row);
            }
        }
    });
    Ok(SweepResult { rows: slots.into_iter().map(|r| r.expect("every row assigned")).collect() })
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with_threads(config, config.threads.resolve())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig4" => Ok(Self::Fig4),
            "fig5" => Ok(Self::Fig5),
            "fig6" => Ok(Self::Fig6),
            "fig7" => Ok(Self::Fig7),
            _ => Err(Error::Config(format!("unknown preset {s:?}; expected fig4, fig5, fig6 or fig7"))),
        }
    }
}

/// Diagonal time range covering growth, peak and saturation: κt up to
/// about 12 with β = 1.
const STRONG_T_MAX: f64 = 2.0;
const WEAK_T_MAX: f64 = 20.0;
const DIAGONAL_COUNT: usize = 201;
const PLANE_T_MAX: f64 = 1.5;
const PLANE_COUNT: usize = 61;

/// Built-in configurations. All use q = 4 and β = 1.
pub fn preset(name: Preset) -> SweepConfig {
    let fin = SystemSize::Finite;
    let diagonal = |t_max| GridSection { t_l: Range::new(0.0, t_max, DIAGONAL_COUNT), t_r: None, diagonal: true };
    let (v, n, mu, encode_len, grid) = match name {
        Preset::Fig4 => (
            0.95,
            vec![fin(100), fin(1000), fin(2000), SystemSize::Infinite],
            vec![-0.05, 0.05],
            vec![1],
            diagonal(STRONG_T_MAX),
        ),
        Preset::Fig5 => (
            0.95,
            vec![fin(100), fin(2000), SystemSize::Infinite],
            vec![-0.05],
            vec![1],
            GridSection {
                t_l: Range::new(0.0, PLANE_T_MAX, PLANE_COUNT),
                t_r: Some(Range::new(0.0, PLANE_T_MAX, PLANE_COUNT)),
                diagonal: false,
            },
        ),
        Preset::Fig6 => (
            0.1,
            vec![fin(1000), fin(2000), SystemSize::Infinite],
            vec![-0.05, 0.05],
            vec![1],
            diagonal(WEAK_T_MAX),
        ),
        Preset::Fig7 => (0.95, vec![fin(1000), SystemSize::Infinite], vec![-0.05], vec![1, 3], diagonal(STRONG_T_MAX)),
    };
    SweepConfig {
        model: ModelSection { q: 4, v, beta: 1.0, n },
        protocol: ProtocolSection { mu, encode_len, long_time_fast_path: false },
        grid,
        quadrature: QuadratureSpec::default(),
        output: OutputSection::default(),
        threads: Threads::Auto,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        SweepConfig {
            model: ModelSection { q: 4, v: 0.95, beta: 1.0, n: vec![SystemSize::Finite(1000), SystemSize::Infinite] },
            protocol: ProtocolSection { mu: vec![-0.05, 0.0], encode_len: vec![1], long_time_fast_path: false },
            grid: GridSection { t_l: Range::new(0.0, 0.6, 4), t_r: Some(Range::new(0.2, 0.4, 2)), diagonal: false },
            quadrature: QuadratureSpec::default(),
            output: OutputSection::default(),
            threads: Threads::Count(2),
        }
    }

    #[test]
    fn range_points() {
        assert_eq!(Range::new(1.0, 1.0, 1).points(), vec![1.0]);
        let p = Range::new(0.0, 2.0, 201).points();
        assert_eq!(p.len(), 201);
        assert_eq!(p[200], 2.0);
        assert!((p[1] - 0.01).abs() < 1e-16);
        assert!(Range::new(1.0, 1.0, 2).validate("x").is_err());
        assert!(Range::new(0.0, 1.0, 0).validate("x").is_err());
    }

    #[test]
    fn point_order_is_lexicographic() {
        let cfg = small_config();
        let pts = cfg.points();
        assert_eq!(pts.len(), 2 * 2 * 4 * 2);
        assert_eq!(pts[0].0, SystemSize::Finite(1000));
        assert_eq!((pts[0].1.t_l, pts[0].1.t_r, pts[0].1.mu), (0.0, 0.2, -0.05));
        assert_eq!((pts[1].1.t_l, pts[1].1.t_r), (0.0, 0.4));
        assert!((pts[2].1.t_l - 0.2).abs() < 1e-15 && pts[2].1.t_r == 0.2);
        assert_eq!(pts[8].1.mu, 0.0);
        assert_eq!(pts[16].0, SystemSize::Infinite);
    }

    #[test]
    fn toml_round_trip() {
        for p in [Preset::Fig4, Preset::Fig5, Preset::Fig6, Preset::Fig7] {
            let cfg = preset(p);
            let back = SweepConfig::from_toml(&cfg.to_toml()).unwrap();
            assert_eq!(back, cfg);
        }
        let mut cfg = small_config();
        cfg.output.units = Units::Bits;
        cfg.output.path = Some("out.csv".into());
        assert_eq!(SweepConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn parses_handwritten_config() {
        let text = r#"
            threads = "auto"
            [model]
            v = 0.95
            N = [100, "inf"]
            [protocol]
            mu = [-0.05]
            [grid]
            t_l = { min = 0.0, max = 1.0, count = 3 }
            diagonal = true
            [quadrature]
            rel_tol = 1e-9
            rule = "laguerre"
        "#;
        let cfg = SweepConfig::from_toml(text).unwrap();
        assert_eq!(cfg.model.q, 4);
        assert_eq!(cfg.model.n, vec![SystemSize::Finite(100), SystemSize::Infinite]);
        assert_eq!(cfg.protocol.encode_len, vec![1]);
        assert_eq!(cfg.threads, Threads::Auto);
        assert_eq!(cfg.quadrature.rel_tol, 1e-9);
        assert_eq!(cfg.points().len(), 6);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = small_config();
        let mut c = base.clone();
        c.grid.diagonal = true;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base.clone();
        c.protocol.encode_len = vec![2];
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base.clone();
        c.model.v = 1.5;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base.clone();
        c.model.n.clear();
        assert!(c.validate().is_err());
        assert!(SweepConfig::from_toml("[model]\nv = 0.5\n").is_err());
        assert!(SweepConfig::from_toml(&base.to_toml().replace("threads = 2", "threads = 0")).is_err());
        assert!(SweepConfig::from_toml(&format!("{}\nextra = 1\n", base.to_toml())).is_err());
    }

    #[test]
    fn threads_parse() {
        assert_eq!("auto".parse::<Threads>().unwrap(), Threads::Auto);
        assert_eq!("8".parse::<Threads>().unwrap(), Threads::Count(8));
        assert!("0".parse::<Threads>().is_err());
        assert!(Threads::Auto.resolve() >= 1);
    }

    #[test]
    fn presets_match_captions() {
        let f4 = preset(Preset::Fig4);
        assert_eq!(f4.model.v, 0.95);
        assert_eq!(f4.protocol.mu, vec![-0.05, 0.05]);
        assert!(f4.grid.diagonal);
        assert_eq!(preset(Preset::Fig6).model.v, 0.1);
        let f7 = preset(Preset::Fig7);
        assert_eq!(f7.protocol.encode_len, vec![1, 3]);
        assert_eq!(f7.protocol.mu, vec![-0.05]);
        assert_eq!(f7.model.n, vec![SystemSize::Finite(1000), SystemSize::Infinite]);
        let f5 = preset(Preset::Fig5);
        assert!(!f5.grid.diagonal);
        assert_eq!(f5.protocol.mu, vec![-0.05]);
        assert_eq!(f5.model.n, vec![SystemSize::Finite(100), SystemSize::Finite(2000), SystemSize::Infinite]);
        for p in [f4, f5, f7] {
            assert!(p.validate().is_ok());
        }
        assert!("fig8".parse::<Preset>().is_err());
    }

    #[test]
    fn zero_coupling_rows_carry_no_information() {
        let mut cfg = small_config();
        cfg.protocol.mu = vec![0.0];
        let res = run_sweep(&cfg).unwrap();
        for r in &res.rows {
            assert_eq!(r.status, RowStatus::Ok);
            assert!(r.mutual_info.abs() <= 1e-10 && r.negativity <= 1e-10, "{r:?}");
        }
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let cfg = small_config();
        let a = run_sweep_with_threads(&cfg, 1).unwrap();
        let b = run_sweep_with_threads(&cfg, 3).unwrap();
        assert_eq!(a.rows.len(), 32);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(format!("{x:?}"), format!("{y:?}"));
        }
    }

    #[test]
    fn fault_isolation() {
        // a single refinement level converges early on but not near the peak
        let cfg = SweepConfig {
            model: ModelSection { q: 4, v: 0.95, beta: 1.0, n: vec![SystemSize::Finite(1000)] },
            protocol: ProtocolSection { mu: vec![-0.05], encode_len: vec![1], long_time_fast_path: false },
            grid: GridSection { t_l: Range::new(0.0, 0.6, 7), t_r: None, diagonal: true },
            quadrature: QuadratureSpec { refinement_limit: 3, ..QuadratureSpec::default() },
            output: OutputSection::default(),
            threads: Threads::Count(2),
        };
        let res = run_sweep(&cfg).unwrap();
        let failed = res.failed_rows();
        assert!(failed > 0 && failed < res.rows.len(), "{:?}", res.rows.iter().map(|r| r.status).collect::<Vec<_>>());
        let params = ModelParams::new(4, 0.95, 1.0, SystemSize::Finite(1000)).unwrap();
        for r in &res.rows {
            let pt = ProtocolPoint::new(r.t_l, r.t_r, r.mu, 1).unwrap();
            let alone = evaluate_row(&params, &pt, &cfg.eval_options(), Units::Nats);
            assert_eq!(format!("{r:?}"), format!("{alone:?}"));
            if r.status == RowStatus::NoConvergence {
                assert!(r.mutual_info.is_nan());
            }
        }
    }

    #[test]
    fn empty_grid_rows_are_empty() {
        let res = SweepResult { rows: Vec::new() };
        assert!(!res.all_failed());
    }
}
