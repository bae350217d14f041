use std::fmt::Write as _;

use serde::Serialize;
use submanifold::geometry::ResidualSet;
use submanifold::EmbeddingMap;

use crate::{Format, RunConfig, MAX_SKIPPED_FRACTION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub x: Vec<f64>,
    /// `None` for skipped points.
    pub gauss: Option<f64>,
    pub codazzi: Option<f64>,
    pub ricci: Option<f64>,
    pub reconstruction: Option<f64>,
    pub scale: Option<f64>,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PointRecord {
    pub fn evaluated(x: Vec<f64>, r: &ResidualSet) -> PointRecord {
        let [gauss, codazzi, ricci, reconstruction] = r.reported();
        PointRecord {
            x,
            gauss: Some(gauss),
            codazzi: Some(codazzi),
            ricci: Some(ricci),
            reconstruction: Some(reconstruction),
            scale: Some(r.scale),
            degenerate: false,
            error: None,
        }
    }

    /// A chart artifact: skipped, not failed.
    pub fn degenerate(x: Vec<f64>, reason: String) -> PointRecord {
        PointRecord { degenerate: true, error: Some(reason), ..PointRecord::empty(x) }
    }

    /// The map could not be evaluated inside its own chart box.
    pub fn failed(x: Vec<f64>, reason: String) -> PointRecord {
        PointRecord { error: Some(reason), ..PointRecord::empty(x) }
    }

    fn empty(x: Vec<f64>) -> PointRecord {
        PointRecord {
            x,
            gauss: None,
            codazzi: None,
            ricci: None,
            reconstruction: None,
            scale: None,
            degenerate: false,
            error: None,
        }
    }

    fn residuals(&self) -> Option<[f64; 4]> {
        Some([self.gauss?, self.codazzi?, self.ricci?, self.reconstruction?])
    }

    /// Every residual finite and within `tol · max(scale, 1)`.
    pub fn passes(&self, tol: f64) -> bool {
        match (self.residuals(), self.scale) {
            (Some(rs), Some(scale)) => {
                let bound = tol * scale.max(1.0);
                rs.iter().all(|r| r.is_finite() && *r <= bound)
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStats {
    pub gauss: Option<f64>,
    pub codazzi: Option<f64>,
    pub ricci: Option<f64>,
    pub reconstruction: Option<f64>,
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregate {
    pub max: ResidualStats,
    pub mean: ResidualStats,
}

impl Aggregate {
    fn over(records: &[PointRecord]) -> Aggregate {
        let columns: [fn(&PointRecord) -> Option<f64>; 5] =
            [|r| r.gauss, |r| r.codazzi, |r| r.ricci, |r| r.reconstruction, |r| r.scale];
        let stat = |column: fn(&PointRecord) -> Option<f64>, reduce: fn(&[f64]) -> f64| {
            let values: Vec<f64> = records.iter().filter_map(column).collect();
            (!values.is_empty()).then(|| reduce(&values))
        };
        let build = |reduce: fn(&[f64]) -> f64| {
            let [g, c, r, x, s] = columns.map(|col| stat(col, reduce));
            ResidualStats { gauss: g, codazzi: c, ricci: r, reconstruction: x, scale: s }
        };
        Aggregate { max: build(nan_max), mean: build(|v| v.iter().sum::<f64>() / v.len() as f64) }
    }
}

fn nan_max(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, |m, v| if m.is_nan() || v.is_nan() { f64::NAN } else { m.max(v) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Degenerate,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail | Verdict::Degenerate => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Degenerate => "DEGENERATE",
        }
    }
}

/// Run parameters that determine the report body. The worker count is left
/// out: it never changes the result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    pub corrupt: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub embedding: String,
    pub n: usize,
    #[serde(rename = "D")]
    pub dim: usize,
    pub signature: Vec<i8>,
    pub variables: Vec<String>,
    pub points: Vec<PointRecord>,
    pub aggregate: Aggregate,
    pub verdict: Verdict,
    pub skipped: usize,
    pub failed: usize,
    pub config: ConfigEcho,
    pub version: String,
}

impl ResidualReport {
    pub fn assemble(map: &EmbeddingMap, config: &RunConfig, points: Vec<PointRecord>) -> ResidualReport {
        let skipped = points.iter().filter(|p| p.degenerate).count();
        let failed = points.iter().filter(|p| !p.degenerate && !p.passes(config.tol)).count();
        let verdict = if failed > 0 {
            Verdict::Fail
        } else if skipped as f64 > MAX_SKIPPED_FRACTION * points.len() as f64 || skipped == points.len() {
            Verdict::Degenerate
        } else {
            Verdict::Pass
        };
        ResidualReport {
            embedding: map.name.clone(),
            n: map.n(),
            dim: map.dim(),
            signature: map.signature.signs().to_vec(),
            variables: map.variables.clone(),
            aggregate: Aggregate::over(&points),
            points,
            verdict,
            skipped,
            failed,
            config: ConfigEcho {
                input: config.input.to_string(),
                points: config.points,
                seed: config.seed,
                tol: config.tol,
                corrupt: config.corruption.map(|c| c.to_string()),
                format: config.format,
            },
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

pub fn emit_report(report: &ResidualReport, format: Format) -> String {
    match format {
        Format::Text => text(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => csv(report),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"))
}

fn text(r: &ResidualReport) -> String {
    let mut out = String::new();
    let signs: Vec<&str> = r.signature.iter().map(|s| if *s > 0 { "+" } else { "-" }).collect();
    let _ = writeln!(out, "embedding   {} (n = {}, D = {}, signature ({}))", r.embedding, r.n, r.dim, signs.join(","));
    let _ = writeln!(
        out,
        "points      {} sampled, {} skipped as degenerate, {} failing",
        r.points.len(),
        r.skipped,
        r.failed
    );
    let _ = writeln!(out, "tolerance   {:e} x max(scale, 1)", r.config.tol);
    if let Some(c) = &r.config.corrupt {
        let _ = writeln!(out, "corruption  {c}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<16}{:>12}{:>12}", "residual", "max", "mean");
    let rows = [
        ("gauss", r.aggregate.max.gauss, r.aggregate.mean.gauss),
        ("codazzi", r.aggregate.max.codazzi, r.aggregate.mean.codazzi),
        ("ricci", r.aggregate.max.ricci, r.aggregate.mean.ricci),
        ("reconstruction", r.aggregate.max.reconstruction, r.aggregate.mean.reconstruction),
        ("scale", r.aggregate.max.scale, r.aggregate.mean.scale),
    ];
    for (name, max, mean) in rows {
        let _ = writeln!(out, "{name:<16}{:>12}{:>12}", opt(max), opt(mean));
    }
    if let Some(p) = r.points.iter().find(|p| !p.degenerate && p.error.is_some()) {
        let _ = writeln!(out, "\nfirst evaluation error at {:?}: {}", p.x, p.error.as_deref().unwrap_or(""));
    }
    let _ = writeln!(out, "\n{}", r.verdict.label());
    out
}

fn csv(r: &ResidualReport) -> String {
    let mut out = String::new();
    let mut header: Vec<&str> = r.variables.iter().map(String::as_str).collect();
    header.extend(["gauss", "codazzi", "ricci", "reconstruction", "scale", "degenerate"]);
    out.push_str(&header.join(","));
    out.push('\n');
    // 17 significant digits read back to the same double
    let num = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.16e}"));
    for p in &r.points {
        let mut row: Vec<String> = p.x.iter().map(|x| num(Some(*x))).collect();
        row.extend([p.gauss, p.codazzi, p.ricci, p.reconstruction, p.scale].map(num));
        row.push(p.degenerate.to_string());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
