use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hypcap::harness::{
    self, tables, ExperimentRow, Outcome, PolygonCase, RegularGrid, RunConfig, DEFAULT_POLYGON_TOL,
    DEFAULT_SMOOTH_TOL,
};
use hypcap::{DiskPoint, HypDisk, SolverParams};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "hypcap", version, about = "Condenser capacities of hyperbolic polygons and disks")]
struct Cli {
    /// Boundary residual target. Defaults to 5e-4 for polygons and 1e-6 for disks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for the random samples of `verify`.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Maximum number of refinement doublings per solve.
    #[arg(long, global = true)]
    max_refine: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Grötzsch modulus mu(r).
    Mu {
        #[arg(required = true)]
        r: Vec<f64>,
    },
    /// Capacity of a hyperbolic disk, solved and in closed form.
    CapDisk {
        /// Hyperbolic radius.
        #[arg(long)]
        radius: f64,
        /// Centre as `re,im`.
        #[arg(long, value_parser = parse_point, default_value = "0,0")]
        center: [f64; 2],
    },
    /// Capacity of the polygons in a JSON file.
    CapPolygon { input: PathBuf },
    /// Triangle against the equilateral triangle of equal area.
    TriangleConjecture {
        /// Polygon file; the built-in reference triangles when omitted.
        input: Option<PathBuf>,
    },
    /// Polygon against the regular polygon of equal perimeter.
    PolygonConjecture { input: Option<PathBuf> },
    /// Capacities of regular polygons over an (m, r) grid.
    RegularTable {
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<f64>>,
    },
    /// Regular polygons of fixed hyperbolic area.
    SeqArea {
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        #[arg(long, default_value_t = 3)]
        m_min: usize,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
    },
    /// Regular polygons of fixed hyperbolic perimeter.
    SeqPerim {
        #[arg(long, default_value_t = 20.0)]
        c: f64,
        #[arg(long, default_value_t = 3)]
        m_min: usize,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
    },
    /// f1(c) - f2(c) on a uniform grid.
    F1f2 {
        #[arg(long, default_value_t = 0.05)]
        c_min: f64,
        #[arg(long, default_value_t = 100.0)]
        c_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Equilateral triangle capacity against its closed-form bounds.
    TriangleBounds {
        #[arg(long, value_delimiter = ',')]
        s: Option<Vec<f64>>,
    },
    /// Closed-form property suites on seeded samples.
    Verify,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected `re,im`, got `{s}`"));
    }
    let re = parts[0].parse::<f64>().map_err(|e| e.to_string())?;
    let im = parts[1].parse::<f64>().map_err(|e| e.to_string())?;
    Ok([re, im])
}

/// Reads either one `{"vertices": ...}` object or a list of them.
fn read_cases(path: &Path) -> Result<Vec<PolygonCase>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut cases: Vec<PolygonCase> = match value {
        Value::Array(_) => serde_json::from_value(value),
        _ => serde_json::from_value(value).map(|c| vec![c]),
    }
    .map_err(|e| format!("{}: {e}", path.display()))?;
    for (k, c) in cases.iter_mut().enumerate() {
        if c.id.is_empty() {
            c.id = format!("polygon{}", k + 1);
        }
    }
    Ok(cases)
}

fn range(lo: usize, hi: usize) -> Result<Vec<usize>, String> {
    if lo < 3 || hi < lo {
        return Err(format!("need 3 <= m-min <= m-max, got {lo}..{hi}"));
    }
    Ok((lo..=hi).collect())
}

enum Report {
    Rows(Vec<ExperimentRow>),
    Grid(Vec<ExperimentRow>, RegularGrid),
}

fn run(cli: &Cli) -> Result<Report, String> {
    let max_refine = cli.max_refine.unwrap_or(SolverParams::default().max_refine);
    let cfg = RunConfig { tol: cli.tol.unwrap_or(DEFAULT_POLYGON_TOL), max_refine };
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(format!("--tol must be positive, got {}", cfg.tol));
    }
    let rows = match &cli.command {
        Command::Mu { r } => harness::run_mu(r),
        Command::CapDisk { radius, center } => {
            let c = DiskPoint::from_re_im(center[0], center[1]).map_err(|e| e.to_string())?;
            let d = HypDisk::new(c, *radius).map_err(|e| e.to_string())?;
            harness::run_cap_disk(&[d], cli.tol.unwrap_or(DEFAULT_SMOOTH_TOL), max_refine)
        }
        Command::CapPolygon { input } => harness::run_cap_polygon(&read_cases(input)?, &cfg),
        Command::TriangleConjecture { input } => {
            let cases = match input {
                Some(p) => read_cases(p)?,
                None => tables::triangles(),
            };
            harness::run_triangle_conjecture(&cases, &cfg)
        }
        Command::PolygonConjecture { input } => {
            let cases = match input {
                Some(p) => read_cases(p)?,
                None => tables::polygons(),
            };
            harness::run_polygon_conjecture(&cases, &cfg)
        }
        Command::RegularTable { m, r } => {
            let defaults = m.is_none() && r.is_none();
            let ms = m.clone().unwrap_or_else(|| tables::REGULAR_MS.to_vec());
            let rs = r.clone().unwrap_or_else(|| tables::REGULAR_RS.to_vec());
            let reference = defaults.then(tables::regular_caps);
            let rows = harness::run_regular_table(&ms, &rs, reference.as_deref(), &cfg);
            let grid = RegularGrid::from_rows(&ms, &rs, &rows);
            return Ok(Report::Grid(rows, grid));
        }
        Command::SeqArea { c, m_min, m_max } => {
            harness::run_sequence_area(*c, &range(*m_min, *m_max)?, &cfg).map_err(|e| e.to_string())?
        }
        Command::SeqPerim { c, m_min, m_max } => {
            harness::run_sequence_perim(*c, &range(*m_min, *m_max)?, &cfg).map_err(|e| e.to_string())?
        }
        Command::F1f2 { c_min, c_max, points } => {
            if !(*c_min > 0.0 && c_max >= c_min) || *points == 0 {
                return Err(format!("need 0 < c-min <= c-max and points > 0, got {c_min}, {c_max}, {points}"));
            }
            let step = if *points > 1 { (c_max - c_min) / (*points - 1) as f64 } else { 0.0 };
            let cs: Vec<f64> = (0..*points).map(|k| c_min + step * k as f64).collect();
            harness::run_f1f2(&cs)
        }
        Command::TriangleBounds { s } => {
            let ss = s.clone().unwrap_or_else(|| (1..=9).map(|k| k as f64 / 10.0).collect());
            harness::run_triangle_bounds(&ss, &cfg)
        }
        Command::Verify => harness::run_verify(cli.seed),
    };
    Ok(Report::Rows(rows))
}

/// Shortest round-trip form, with an exponent for small and large values.
fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::Value::from(x).to_string()
    } else {
        String::new()
    }
}

fn rows_csv(rows: &[ExperimentRow]) -> Result<Vec<u8>, String> {
    let values: BTreeSet<&str> = rows.iter().flat_map(|r| r.values.keys().map(String::as_str)).collect();
    let verdicts: BTreeSet<&str> = rows.iter().flat_map(|r| r.verdicts.keys().map(String::as_str)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string(), "inputs".to_string(), "residual".to_string()];
    header.extend(values.iter().map(|k| k.to_string()));
    header.extend(verdicts.iter().map(|k| format!("verdict_{k}")));
    header.push("error".into());
    w.write_record(&header).map_err(|e| e.to_string())?;
    for r in rows {
        let mut rec = vec![r.id.clone(), r.inputs.to_string(), num(r.residual)];
        rec.extend(values.iter().map(|k| r.values.get(*k).copied().map(num).unwrap_or_default()));
        rec.extend(verdicts.iter().map(|k| {
            r.verdicts
                .get(*k)
                .map(|v| serde_json::to_value(v.status).ok().and_then(|s| s.as_str().map(String::from)).unwrap_or_default())
                .unwrap_or_default()
        }));
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

fn grid_csv(g: &RegularGrid) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["r".to_string()];
    header.extend(g.ms.iter().map(|m| format!("m={m}")));
    w.write_record(&header).map_err(|e| e.to_string())?;
    for (r, caps) in g.rs.iter().zip(&g.caps) {
        let mut rec = vec![num(*r)];
        rec.extend(caps.iter().copied().map(num));
        w.write_record(&rec).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

fn render(report: &Report, format: Format) -> Result<Vec<u8>, String> {
    match (report, format) {
        (Report::Rows(rows) | Report::Grid(rows, _), Format::Json) => {
            let mut text = serde_json::to_vec_pretty(rows).map_err(|e| e.to_string())?;
            text.push(b'\n');
            Ok(text)
        }
        (Report::Rows(rows), Format::Csv) => rows_csv(rows),
        (Report::Grid(_, grid), Format::Csv) => grid_csv(grid),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let bytes = match render(&report, cli.format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout().write_all(&bytes).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let rows = match &report {
        Report::Rows(rows) | Report::Grid(rows, _) => rows,
    };
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("{}: {}", r.id, r.error.as_deref().unwrap_or_default());
    }
    ExitCode::from(Outcome::of(rows).exit_code() as u8)
}
