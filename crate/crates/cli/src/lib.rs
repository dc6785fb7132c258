//! Benchmark harness: runs the preset integrands through the hp integrator
//! and the adaptive Simpson baseline, and writes mesh and graph data for
//! plotting.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hpquad::{
    simpson_adaptive, AdaptiveConfig, HpIntegrator, IntegrationResult, Preset, QuadError,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("unknown case `{0}` (expected f1..f5 or all)")]
    UnknownCase(String),
    #[error("need at least 2 graph samples, got {0}")]
    TooFewSamples(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

/// A preset integrand on an interval. The exact value is only known on the
/// preset's own interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkCase {
    pub name: &'static str,
    pub integrand: Preset,
    pub interval: (f64, f64),
    pub exact_value: Option<f64>,
}

impl BenchmarkCase {
    pub fn new(preset: Preset) -> Self {
        Self {
            name: preset.name(),
            integrand: preset,
            interval: preset.interval(),
            exact_value: preset.exact_value(),
        }
    }

    pub fn with_interval(self, a: f64, b: f64) -> Self {
        let exact_value = if (a, b) == self.integrand.interval() {
            self.integrand.exact_value()
        } else {
            None
        };
        Self {
            interval: (a, b),
            exact_value,
            ..self
        }
    }
}

/// `all` or a single preset name.
pub fn select_cases(selection: &str) -> Result<Vec<BenchmarkCase>> {
    if selection.eq_ignore_ascii_case("all") {
        return Ok(Preset::ALL.into_iter().map(BenchmarkCase::new).collect());
    }
    Preset::from_name(selection)
        .map(|p| vec![BenchmarkCase::new(p)])
        .ok_or_else(|| CliError::UnknownCase(selection.to_string()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub compare_simpson: bool,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub case: String,
    pub a: f64,
    pub b: f64,
    pub value: Option<f64>,
    pub exact_value: Option<f64>,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
    pub vector_calls: Option<u64>,
    pub scalar_evals: Option<u64>,
    pub passes: Option<usize>,
    pub forced_accepts: Option<usize>,
    /// Wall time of the integrate call in seconds.
    pub wall_time: Option<f64>,
    pub simpson_value: Option<f64>,
    pub simpson_scalar_evals: Option<u64>,
    pub error: Option<String>,
}

impl CaseRow {
    fn empty(case: &BenchmarkCase) -> Self {
        Self {
            case: case.name.to_string(),
            a: case.interval.0,
            b: case.interval.1,
            value: None,
            exact_value: case.exact_value,
            abs_error: None,
            rel_error: None,
            vector_calls: None,
            scalar_evals: None,
            passes: None,
            forced_accepts: None,
            wall_time: None,
            simpson_value: None,
            simpson_scalar_evals: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: AdaptiveConfig,
    pub rows: Vec<CaseRow>,
}

impl RunReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.error.is_none())
    }

    /// Aligned plain-text table.
    pub fn render_text(&self) -> String {
        let opt =
            |v: Option<f64>, prec: usize| v.map_or("-".to_string(), |v| format!("{v:.prec$e}"));
        let cnt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        let header = [
            "case",
            "value",
            "abs err",
            "rel err",
            "calls",
            "evals",
            "passes",
            "forced",
            "time [s]",
            "simpson evals",
            "simpson value",
        ];
        let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            table.push(vec![
                r.case.clone(),
                opt(r.value, 16),
                opt(r.abs_error, 2),
                opt(r.rel_error, 2),
                cnt(r.vector_calls),
                cnt(r.scalar_evals),
                cnt(r.passes.map(|v| v as u64)),
                cnt(r.forced_accepts.map(|v| v as u64)),
                r.wall_time.map_or("-".to_string(), |t| format!("{t:.6}")),
                cnt(r.simpson_scalar_evals),
                opt(r.simpson_value, 16),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &table {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| {
                    if c == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        for r in &self.rows {
            if let Some(e) = &r.error {
                let _ = writeln!(out, "{}: error: {e}", r.case);
            }
        }
        out
    }
}

fn run_case(
    integrator: &HpIntegrator,
    case: &BenchmarkCase,
    opts: RunOptions,
) -> (CaseRow, Option<IntegrationResult>) {
    let mut row = CaseRow::empty(case);
    let (a, b) = case.interval;
    let start = Instant::now();
    let result = integrator.integrate(&case.integrand, a, b);
    let elapsed = start.elapsed().as_secs_f64();
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            row.error = Some(e.to_string());
            return (row, None);
        }
    };
    row.value = Some(result.value);
    if let Some(exact) = case.exact_value {
        let abs = (result.value - exact).abs();
        row.abs_error = Some(abs);
        row.rel_error = (exact != 0.0).then(|| abs / exact.abs());
    }
    row.vector_calls = Some(result.stats.vector_calls);
    row.scalar_evals = Some(result.stats.scalar_evals);
    row.passes = Some(result.stats.passes);
    row.forced_accepts = Some(result.stats.forced_accepts);
    row.wall_time = Some(elapsed);
    if opts.compare_simpson {
        match simpson_adaptive(case.integrand.function(), a, b, integrator.config().tol) {
            Ok(s) => {
                row.simpson_value = Some(s.value);
                row.simpson_scalar_evals = Some(s.stats.scalar_evals);
            }
            Err(e) => row.error = Some(format!("simpson: {e}")),
        }
    }
    (row, Some(result))
}

/// Runs every case. A failing case is recorded in its row and does not stop
/// the others. The rule tables are built once, before any timing starts.
pub fn run_benchmarks(
    cases: &[BenchmarkCase],
    cfg: &AdaptiveConfig,
    opts: RunOptions,
) -> Result<(RunReport, Vec<Option<IntegrationResult>>)> {
    let integrator = HpIntegrator::new(cfg.clone())?;
    let outcomes: Vec<_> = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = cases
                .iter()
                .map(|case| s.spawn(|| run_case(&integrator, case, opts)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("case thread panicked"))
                .collect()
        })
    } else {
        cases
            .iter()
            .map(|case| run_case(&integrator, case, opts))
            .collect()
    };
    let (rows, results) = outcomes.into_iter().unzip();
    Ok((
        RunReport {
            config: cfg.clone(),
            rows,
        },
        results,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Csv,
    Json,
}

#[derive(Serialize)]
struct MeshRow {
    a: f64,
    b: f64,
    p: usize,
}

/// Accepted segments in ascending order, as CSV (`a,b,p` header) or as a JSON
/// array of `{a, b, p}` objects. Floats use the shortest representation that
/// reads back to the same value.
pub fn emit_mesh(result: &IntegrationResult, format: MeshFormat) -> Result<Vec<u8>> {
    if result.mesh.is_empty() {
        return Err(QuadError::EmptyMesh.into());
    }
    let rows: Vec<MeshRow> = result
        .mesh
        .iter()
        .map(|e| MeshRow {
            a: e.a,
            b: e.b,
            p: e.p,
        })
        .collect();
    match format {
        MeshFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["a", "b", "p"])?;
            for row in &rows {
                w.write_record([row.a.to_string(), row.b.to_string(), row.p.to_string()])?;
            }
            w.into_inner()
                .map_err(|e| CliError::Csv(e.into_error().into()))
        }
        MeshFormat::Json => {
            let mut out = serde_json::to_vec_pretty(&rows)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// `x,f` samples at `samples` uniformly spaced points including both ends.
/// A non-finite value is written as an empty field.
pub fn emit_graph(case: &BenchmarkCase, samples: usize) -> Result<Vec<u8>> {
    if samples < 2 {
        return Err(CliError::TooFewSamples(samples));
    }
    let (a, b) = case.interval;
    let step = (b - a) / (samples - 1) as f64;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "f"])?;
    for i in 0..samples {
        let x = if i + 1 == samples {
            b
        } else {
            a + i as f64 * step
        };
        let y = case.integrand.eval(x);
        let y = if y.is_finite() {
            y.to_string()
        } else {
            String::new()
        };
        w.write_record([x.to_string(), y])?;
    }
    w.into_inner()
        .map_err(|e| CliError::Csv(e.into_error().into()))
}

/// `path` itself for a single case, otherwise `stem-<case>.ext` next to it.
pub fn output_path(path: &Path, case: &str, multiple: bool) -> PathBuf {
    if !multiple {
        return path.to_path_buf();
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{case}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{case}"),
    };
    path.with_file_name(name)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
