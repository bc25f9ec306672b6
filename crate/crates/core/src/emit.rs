//! CSV/JSON serialization of sweep results and the metadata sidecar.
//!
//! Floats are rounded to 12 significant digits before writing; NaN is
//! written as `nan` in CSV and `null` in JSON.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::SystemSize;
use crate::sweep::{Format, RowStatus, SweepConfig, SweepResult, SweepRow};

/// Column names in output order.
pub const COLUMNS: [&str; 22] = [
    "t_L", "t_R", "mu", "N", "encode_len", "re_I1", "im_I1", "re_I2", "im_I2", "re_I3", "im_I3", "re_I4", "im_I4",
    "err_I1", "err_I2", "err_I3", "err_I4", "rho2", "rho4", "mutual_info", "negativity", "status",
];

pub fn header() -> Vec<&'static str> {
    COLUMNS.to_vec()
}

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Nearest double to `x` printed with 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x) + 0.0;
    let a = r.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn numeric_fields(r: &SweepRow) -> [f64; 16] {
    [
        r.i[0].re, r.i[0].im, r.i[1].re, r.i[1].im, r.i[2].re, r.i[2].im, r.i[3].re, r.i[3].im, r.err[0], r.err[1],
        r.err[2], r.err[3], r.rho2, r.rho4, r.mutual_info, r.negativity,
    ]
}

fn from_numeric(head: (f64, f64, f64, SystemSize, u32), v: &[f64; 16], status: RowStatus) -> SweepRow {
    SweepRow {
        t_l: head.0,
        t_r: head.1,
        mu: head.2,
        n: head.3,
        encode_len: head.4,
        i: [Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]), Complex64::new(v[4], v[5]), Complex64::new(v[6], v[7])],
        err: [v[8], v[9], v[10], v[11]],
        rho2: v[12],
        rho4: v[13],
        mutual_info: v[14],
        negativity: v[15],
        status,
    }
}

/// The result as it reads back after serialization.
pub fn rounded(result: &SweepResult) -> SweepResult {
    let rows = result
        .rows
        .iter()
        .map(|r| {
            let v = numeric_fields(r).map(round_sig);
            from_numeric((round_sig(r.t_l), round_sig(r.t_r), round_sig(r.mu), r.n, r.encode_len), &v, r.status)
        })
        .collect();
    SweepResult { rows }
}

pub fn to_csv(result: &SweepResult) -> String {
    let mut out = header().join(",");
    out.push('\n');
    for r in &result.rows {
        let mut cells = vec![fmt_float(r.t_l), fmt_float(r.t_r), fmt_float(r.mu), r.n.to_string(), r.encode_len.to_string()];
        cells.extend(numeric_fields(r).iter().map(|&x| fmt_float(x)));
        cells.push(r.status.as_str().into());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Config(format!("bad number {s:?}")))
}

pub fn from_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| Error::Config("empty CSV".into()))?;
    if head != header().join(",") {
        return Err(Error::Config("unexpected CSV header".into()));
    }
    let mut rows = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header().len() {
            return Err(Error::Config(format!("expected {} cells, got {}", header().len(), cells.len())));
        }
        let n: SystemSize = cells[3].parse()?;
        let e: u32 = cells[4].parse().map_err(|_| Error::Config(format!("bad encode_len {:?}", cells[4])))?;
        let mut v = [0.0; 16];
        for (k, c) in cells[5..21].iter().enumerate() {
            v[k] = parse_float(c)?;
        }
        let head = (parse_float(cells[0])?, parse_float(cells[1])?, parse_float(cells[2])?, n, e);
        rows.push(from_numeric(head, &v, cells[21].parse()?));
    }
    Ok(SweepResult { rows })
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x) + 0.0)
    } else {
        Value::Null
    }
}

pub fn to_json(result: &SweepResult) -> String {
    let names = header();
    let rows: Vec<Value> = result
        .rows
        .iter()
        .map(|r| {
            let mut obj = Map::new();
            obj.insert(names[0].into(), json_float(r.t_l));
            obj.insert(names[1].into(), json_float(r.t_r));
            obj.insert(names[2].into(), json_float(r.mu));
            obj.insert(names[3].into(), serde_json::to_value(r.n).expect("size serializes"));
            obj.insert(names[4].into(), json!(r.encode_len));
            for (k, x) in numeric_fields(r).iter().enumerate() {
                obj.insert(names[5 + k].into(), json_float(*x));
            }
            obj.insert(names[21].into(), json!(r.status.as_str()));
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("rows serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<SweepResult> {
    let bad = |what: &str| Error::Config(format!("bad JSON row: {what}"));
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let arr = value.as_array().ok_or_else(|| bad("expected an array"))?;
    let names = header();
    let num = |o: &Map<String, Value>, k: &str| -> Result<f64> {
        match o.get(k) {
            Some(Value::Null) => Ok(f64::NAN),
            Some(v) => v.as_f64().ok_or_else(|| bad(k)),
            None => Err(bad(k)),
        }
    };
    let mut rows = Vec::with_capacity(arr.len());
    for item in arr {
        let o = item.as_object().ok_or_else(|| bad("expected an object"))?;
        let n: SystemSize = serde_json::from_value(o.get("N").cloned().ok_or_else(|| bad("N"))?)
            .map_err(|e| Error::Config(e.to_string()))?;
        let e = o.get("encode_len").and_then(Value::as_u64).ok_or_else(|| bad("encode_len"))? as u32;
        let mut v = [0.0; 16];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = num(o, names[5 + k])?;
        }
        let status = o.get("status").and_then(Value::as_str).ok_or_else(|| bad("status"))?.parse()?;
        let head = (num(o, "t_L")?, num(o, "t_R")?, num(o, "mu")?, n, e);
        rows.push(from_numeric(head, &v, status));
    }
    Ok(SweepResult { rows })
}

pub fn render(result: &SweepResult, format: Format) -> String {
    match format {
        Format::Csv => to_csv(result),
        Format::Json => to_json(result),
    }
}

/// `<output>.meta.json`
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    output.with_file_name(name)
}

pub fn metadata(result: &SweepResult, config: &SweepConfig) -> Value {
    json!({
        "library": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "rows": result.rows.len(),
        "failed_rows": result.failed_rows(),
        "columns": header(),
    })
}

pub fn config_from_metadata(text: &str) -> Result<SweepConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let cfg: SweepConfig =
        serde_json::from_value(v.get("config").cloned().ok_or_else(|| Error::Config("metadata lacks config".into()))?)
            .map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Writes the table to `path` (or standard output) and, for a file, the
/// metadata sidecar next to it.
pub fn emit(result: &SweepResult, config: &SweepConfig, path: Option<&Path>, format: Format) -> Result<()> {
    let body = render(result, format);
    match path {
        Some(p) => {
            fs::write(p, body)?;
            let mut meta = serde_json::to_string_pretty(&metadata(result, config)).expect("metadata serializes");
            meta.push('\n');
            fs::write(sidecar_path(p), meta)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
