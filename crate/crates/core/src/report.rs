//! Report rows, CSV serialization, and run manifests.
//!
//! Every number is rendered with Rust's default `f64` formatting
//! (shortest round-trip), so identical values always serialize to
//! identical bytes; reports are deterministic as long as the values
//! are.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::Result;

/// One growth-table entry: the closed-ball count at a unit (or point).
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub unit: u32,
    pub r: f64,
    pub count: u64,
}

/// One per-fiber norm entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NormRow {
    pub unit: u32,
    pub dim: usize,
    pub spectral_norm: f64,
    pub residual: f64,
}

/// One scan entry: a test function's RD ratio and certified bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub kind: String,
    pub t: f64,
    pub param: String,
    pub ratio: f64,
    pub bound: f64,
    pub residual: f64,
}

/// One permanence-check entry: an inequality with its slack.
#[derive(Debug, Clone, PartialEq)]
pub struct PermanenceRow {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub tol: f64,
}

/// One dichotomy-experiment entry; `classification` repeats the
/// family-level verdict on every row of that family.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyRow {
    pub family: String,
    pub size: u32,
    pub t: f64,
    pub growth_exponent: f64,
    pub scan_max_ratio: f64,
    pub witness_bound: f64,
    pub classification: String,
}

/// Relative agreement of the last two sizes that counts as "bounded".
pub const BOUNDED_REL_TOL: f64 = 0.10;
/// Trailing sizes whose certified bounds must strictly increase to
/// count as "diverging".
pub const DIVERGING_WINDOW: usize = 3;

/// Empirical dichotomy verdict from per-size scan maxima and certified
/// witness bounds: diverging witness bounds win over bounded-looking
/// scans, since they are lower bounds rather than samples.
pub fn classify_dichotomy(scan_max: &[f64], witness_bounds: &[f64]) -> String {
    let diverging = witness_bounds.len() >= DIVERGING_WINDOW
        && witness_bounds
            .windows(2)
            .skip(witness_bounds.len() - DIVERGING_WINDOW)
            .take(DIVERGING_WINDOW - 1)
            .all(|w| w[1] > w[0]);
    if diverging {
        return "rd_violating".to_owned();
    }
    if scan_max.len() >= 2 {
        let a = scan_max[scan_max.len() - 2];
        let b = scan_max[scan_max.len() - 1];
        if (a - b).abs() <= BOUNDED_REL_TOL * a.abs().max(b.abs()) {
            return "rd_consistent".to_owned();
        }
    }
    "inconclusive".to_owned()
}

pub trait CsvRow {
    const HEADER: &'static str;
    fn csv_line(&self) -> String;
}

impl CsvRow for GrowthRow {
    const HEADER: &'static str = "unit,r,count";
    fn csv_line(&self) -> String {
        format!("{},{},{}", self.unit, self.r, self.count)
    }
}

impl CsvRow for NormRow {
    const HEADER: &'static str = "unit,dim,spectral_norm,residual";
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{}",
            self.unit, self.dim, self.spectral_norm, self.residual
        )
    }
}

impl CsvRow for ScanRow {
    const HEADER: &'static str = "kind,t,param,ratio,bound,residual";
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.kind, self.t, self.param, self.ratio, self.bound, self.residual
        )
    }
}

impl CsvRow for PermanenceRow {
    const HEADER: &'static str = "check,lhs,rhs,pass,tol";
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.check, self.lhs, self.rhs, self.pass, self.tol
        )
    }
}

impl CsvRow for DichotomyRow {
    const HEADER: &'static str =
        "family,size,t,growth_exponent,scan_max_ratio,witness_bound,classification";
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.family,
            self.size,
            self.t,
            self.growth_exponent,
            self.scan_max_ratio,
            self.witness_bound,
            self.classification
        )
    }
}

/// Renders header plus rows, one line each, with trailing newline.
pub fn render_csv<R: CsvRow>(rows: &[R]) -> String {
    let mut out = String::with_capacity(16 + rows.len() * 32);
    out.push_str(R::HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

pub fn write_csv<R: CsvRow>(path: &Path, rows: &[R]) -> Result<()> {
    std::fs::write(path, render_csv(rows))?;
    Ok(())
}

/// A flat `key=value` manifest recording everything needed to
/// reproduce a run: input digests, seed, tool version, tolerances.
/// Keys render sorted, one per line.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new() -> Self {
        let mut m = Manifest::default();
        m.set("tool_version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Records the SHA-256 digest of an input file under
    /// `input.<name>`.
    pub fn record_input(&mut self, name: &str, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.set(&format!("input.{name}"), sha256_hex(&bytes));
        Ok(())
    }

    /// Records a digest for an input that never touched disk (builtin
    /// generator specs and the like).
    pub fn record_inline_input(&mut self, name: &str, spec: &str) {
        self.set(&format!("input.{name}"), sha256_hex(spec.as_bytes()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering_is_stable_and_headed() {
        let rows = vec![
            ScanRow {
                kind: "balls".into(),
                t: 1.0,
                param: "unit=0;r=2".into(),
                ratio: 1.5,
                bound: 1.25,
                residual: 0.0,
            },
            ScanRow {
                kind: "random".into(),
                t: 0.5,
                param: "trial=3".into(),
                ratio: 0.1111111111111111,
                bound: 0.0,
                residual: 1e-12,
            },
        ];
        let a = render_csv(&rows);
        let b = render_csv(&rows);
        assert_eq!(a, b);
        assert!(a.starts_with("kind,t,param,ratio,bound,residual\n"));
        assert!(a.contains("balls,1,unit=0;r=2,1.5,1.25,0\n"));
        assert!(a.contains("random,0.5,trial=3,0.1111111111111111,0,0.000000000001\n"));
    }

    #[test]
    fn manifest_renders_sorted_with_digests() {
        let mut m = Manifest::new();
        m.set("seed", 7u64);
        m.set("a_first", "x");
        m.record_inline_input("groupoid", "builtin:pair:3");
        let text = m.render();
        let lines: Vec<&str> = text.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort_unstable();
        assert_eq!(lines, sorted);
        assert!(text.contains("seed=7\n"));
        assert!(text.contains(&format!(
            "input.groupoid={}\n",
            sha256_hex("builtin:pair:3".as_bytes())
        )));
        assert!(text.contains("tool_version="));
    }

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
