//! The `intreach` command line.
//!
//! Every run writes a metadata record first: a `# {json}` comment line for CSV
//! output, or a `meta` member for JSON output. It holds the tool version, the
//! resolved run configuration and the parsed spec, and nothing time dependent,
//! so identical invocations give byte-identical files (timings reported by
//! `bench` aside).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::{sample_system, Sheet};
use crate::error::ReachError;
use crate::harness::{
    containment_audit, mc_volume, mc_volume_joint, random_cloud, random_unit, run_bench,
    sample_rng, simulate_endpoint, DirectionPlan, InputSchedule,
};
use crate::implicit::{
    implicit_poly, line_intersections, membership, state_space_poly, MembershipOptions,
};
use crate::model::{InputSet, SystemSpec};
use crate::poly::MultiPoly;
use crate::support::{center, support};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Reach(#[from] ReachError),
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Write(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Reach(e) if e.is_numerical() => 3,
            CliError::Write(_) => 1,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Reach(e) => e.kind(),
            CliError::Read { .. } => "read_error",
            CliError::Parse { .. } => "parse_error",
            CliError::Usage(_) => "usage",
            CliError::Write(_) => "write_error",
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditMethod {
    Optimized,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Support function values for a list of directions.
    Support,
    /// Points on both boundary sheets of every block, on a parameter grid.
    Boundary,
    /// The implicit bounding polynomial, in rho and optionally state space.
    Implicit,
    /// Intersection counts of random lines through interior points.
    Lines,
    /// Inside / boundary / outside classification of states.
    Membership,
    /// Endpoint of a piecewise-constant input schedule.
    Simulate,
    /// Endpoints of random piecewise-constant inputs.
    Cloud,
    /// Containment audit of a point cloud.
    Audit,
    /// Monte Carlo volume per block and of the product.
    Volume,
    /// Timings and outer-approximation gaps.
    Bench,
}

#[derive(Debug, Parser)]
#[command(
    name = "intreach",
    version,
    about = "Exact reach sets of integrator chains with bounded inputs"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Spec JSON file.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Horizon override.
    #[arg(long, global = true)]
    t: Option<f64>,
    /// Grid points per switching-time axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Sample count (clouds, volumes, random lines or directions).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Piecewise-constant segments for random inputs.
    #[arg(long, global = true)]
    segments: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CSV file of directions, one per row.
    #[arg(long, global = true)]
    dirs: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Boundary tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Block order for `implicit` without a spec.
    #[arg(long, global = true)]
    r: Option<usize>,
    /// CSV file of states, one per row.
    #[arg(long, global = true)]
    points: Option<PathBuf>,
    /// Input schedule JSON for `simulate`.
    #[arg(long, global = true)]
    schedule: Option<PathBuf>,
    /// Margin computation for `audit`.
    #[arg(long, global = true, value_enum)]
    method: Option<AuditMethod>,
    /// Random directions per block for `audit --method sampled`.
    #[arg(long, global = true)]
    directions: Option<usize>,
}

/// Resolved settings of one run, echoed in the output metadata.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub spec: Option<String>,
    pub t: Option<f64>,
    pub grid: usize,
    pub samples: usize,
    pub segments: usize,
    pub seed: u64,
    pub dirs: Option<String>,
    pub points: Option<String>,
    pub schedule: Option<String>,
    pub format: Format,
    pub tol: Option<f64>,
    pub r: Option<usize>,
    pub method: AuditMethod,
    pub directions: usize,
}

impl RunConfig {
    fn from_args(a: &Args) -> Self {
        let default_samples = match a.command {
            Command::Cloud | Command::Audit => 10_000,
            Command::Volume => 100_000,
            Command::Lines => 100,
            Command::Bench => 1_000,
            _ => 0,
        };
        let default_format = match a.command {
            Command::Implicit | Command::Bench | Command::Simulate => Format::Json,
            Command::Audit | Command::Volume => Format::Json,
            _ => Format::Csv,
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        RunConfig {
            command: a.command,
            spec: path(&a.spec),
            t: a.t,
            grid: a.grid.unwrap_or(50),
            samples: a.samples.unwrap_or(default_samples),
            segments: a.segments.unwrap_or(4),
            seed: a.seed.unwrap_or(0),
            dirs: path(&a.dirs),
            points: path(&a.points),
            schedule: path(&a.schedule),
            format: a.format.unwrap_or(default_format),
            tol: a.tol,
            r: a.r,
            method: a.method.unwrap_or(AuditMethod::Optimized),
            directions: a.directions.unwrap_or(256),
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

/// Rows of floats from a CSV file; `#` lines are comments and a first row that
/// does not parse is taken as a header.
pub fn read_float_rows(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(CliError::Parse {
                    path: path.display().to_string(),
                    message: format!("row {}: {e}", i + 1),
                })
            }
        }
    }
    Ok(rows)
}

struct Ctx {
    cfg: RunConfig,
    spec: Option<SystemSpec>,
}

impl Ctx {
    fn spec(&self) -> CliResult<&SystemSpec> {
        self.spec.as_ref().ok_or_else(|| {
            CliError::Usage(format!("{:?} needs --spec", self.cfg.command).to_lowercase())
        })
    }

    fn meta(&self) -> Value {
        json!({
            "tool": "intreach",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.cfg.command,
            "config": self.cfg,
            "spec": self.spec.as_ref().map(|s| serde_json::to_value(s.raw()).expect("spec serializes")),
        })
    }
}

/// Tabular output: a header and rows of preformatted fields.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// A command's result: its CSV table and its JSON form.
struct Output {
    table: Table,
    data: Value,
}

fn render(ctx: &Ctx, out: Output) -> CliResult<Vec<u8>> {
    let meta = ctx.meta();
    let mut buf = Vec::new();
    let Output { table, data } = out;
    match ctx.cfg.format {
        Format::Csv => {
            writeln!(buf, "# {}", serde_json::to_string(&meta).expect("json"))?;
            let mut w = csv::WriterBuilder::new()
                .flexible(true)
                .from_writer(&mut buf);
            w.write_record(&table.header)
                .map_err(std::io::Error::from)?;
            for row in &table.rows {
                w.write_record(row).map_err(std::io::Error::from)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let doc = json!({ "meta": meta, "data": data });
            serde_json::to_writer_pretty(&mut buf, &doc).expect("json");
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn floats(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| fmt_f64(*x)).collect()
}

fn check_rows(rows: &[Vec<f64>], d: usize, what: &str) -> CliResult<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(CliError::Reach(ReachError::InvalidParams(format!(
                "{what} row {} has {} entries, expected {d}",
                i + 1,
                row.len()
            ))));
        }
    }
    Ok(())
}

fn cmd_support(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let d = spec.d();
    let dirs = match &ctx.cfg.dirs {
        Some(p) => read_float_rows(Path::new(p))?,
        None => {
            let mut rng = sample_rng(ctx.cfg.seed, 0);
            (0..ctx.cfg.samples)
                .map(|_| random_unit(d, &mut rng))
                .collect()
        }
    };
    check_rows(&dirs, d, "direction")?;
    let h: Vec<f64> = dirs
        .iter()
        .map(|y| support(spec, y))
        .collect::<Result<_, _>>()?;
    let mut header = numbered("y", d);
    header.push("h".into());
    let rows = dirs
        .iter()
        .zip(&h)
        .map(|(y, hv)| {
            let mut r = floats(y);
            r.push(fmt_f64(*hv));
            r
        })
        .collect();
    let data = dirs
        .iter()
        .zip(&h)
        .map(|(y, hv)| json!({ "direction": y, "h": hv }))
        .collect();
    Ok(Output {
        table: Table { header, rows },
        data: Value::Array(data),
    })
}

fn cmd_boundary(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let pts = sample_system(spec, ctx.cfg.grid)?;
    let rmax = spec.blocks.iter().map(|b| b.r).max().unwrap_or(1);
    let mut header = vec!["block".to_string(), "sheet".to_string()];
    header.extend(numbered("s", rmax - 1));
    header.extend(numbered("x", rmax));
    let rows = pts
        .iter()
        .map(|p| {
            let mut r = vec![p.block.to_string(), p.params.sheet.as_int().to_string()];
            let mut s = floats(&p.params.s);
            s.resize(rmax - 1, String::new());
            let mut x = floats(&p.x);
            x.resize(rmax, String::new());
            r.extend(s);
            r.extend(x);
            r
        })
        .collect();
    let data = serde_json::to_value(&pts).expect("json");
    Ok(Output {
        table: Table { header, rows },
        data,
    })
}

fn poly_json(p: &MultiPoly) -> Value {
    let terms: Vec<Value> = p
        .to_term_list()
        .into_iter()
        .zip(p.terms())
        .map(|(t, (_, c))| {
            let mut v = serde_json::to_value(t).expect("term serializes");
            v["value"] = json!(crate::model::rational_to_f64(c));
            v
        })
        .collect();
    json!({
        "variables": p.vars(),
        "polynomial": p.to_string(),
        "terms": terms,
    })
}

fn cmd_implicit(ctx: &Ctx) -> CliResult<Output> {
    let orders: Vec<usize> = match (&ctx.spec, ctx.cfg.r) {
        (_, Some(r)) => vec![r],
        (Some(s), None) => {
            let mut rs: Vec<usize> = s.blocks.iter().map(|b| b.r).collect();
            rs.sort_unstable();
            rs.dedup();
            rs
        }
        (None, None) => return Err(CliError::Usage("implicit needs --r or --spec".into())),
    };
    let mut surfaces = Vec::new();
    let mut rows = Vec::new();
    for r in orders {
        let s = implicit_poly(r)?;
        let mut v = poly_json(&s.poly);
        v["r"] = json!(s.r);
        v["delta"] = json!(s.delta);
        v["degree"] = json!(s.degree);
        v["normalization"] = json!(s.normalization.to_string());
        surfaces.push(v);
        for (m, c) in s.poly.terms() {
            rows.push(vec![
                "rho".to_string(),
                r.to_string(),
                String::new(),
                String::new(),
                m.0.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
                c.to_string(),
                fmt_f64(crate::model::rational_to_f64(c)),
            ]);
        }
    }
    let mut state_space = Vec::new();
    if let Some(spec) = &ctx.spec {
        for (j, b) in spec.blocks.iter().enumerate() {
            for sheet in Sheet::BOTH {
                let p = state_space_poly(b, sheet, &spec.t_exact, j)?;
                let mut v = poly_json(&p);
                v["block"] = json!(j);
                v["sheet"] = json!(sheet.as_int());
                for (m, c) in p.terms() {
                    rows.push(vec![
                        "x".to_string(),
                        b.r.to_string(),
                        j.to_string(),
                        sheet.as_int().to_string(),
                        m.0.iter()
                            .map(|e| e.to_string())
                            .collect::<Vec<_>>()
                            .join(" "),
                        c.to_string(),
                        fmt_f64(crate::model::rational_to_f64(c)),
                    ]);
                }
                state_space.push(v);
            }
        }
    }
    let header = [
        "space",
        "r",
        "block",
        "sheet",
        "exponents",
        "coefficient",
        "value",
    ]
    .map(String::from)
    .to_vec();
    let mut data = json!({ "surfaces": surfaces });
    if ctx.spec.is_some() {
        data["state_space"] = Value::Array(state_space);
    }
    Ok(Output {
        table: Table { header, rows },
        data,
    })
}

/// A random interior point of block `j`: the endpoint of a random input with
/// values in the middle half of `[alpha, beta]`.
fn interior_point(
    spec: &SystemSpec,
    j: usize,
    segments: usize,
    rng: &mut impl rand::Rng,
) -> Vec<f64> {
    let b = &spec.blocks[j];
    let k = segments.max(1);
    let mut x = center(b, spec.t);
    for seg in 0..k {
        let w: f64 = rng.random_range(-0.5..=0.5);
        let t_hi = spec.t * (k - seg) as f64 / k as f64;
        let t_lo = spec.t * (k - seg - 1) as f64 / k as f64;
        for (xi, z) in x.iter_mut().zip(crate::support::zeta(b.r, t_lo, t_hi)) {
            *xi += w * b.mu * z;
        }
    }
    x
}

fn cmd_lines(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let rmax = spec.blocks.iter().map(|b| b.r).max().unwrap_or(1);
    let mut header = vec!["block".to_string(), "line".to_string()];
    header.extend(numbered("p", rmax));
    header.extend(numbered("v", rmax));
    header.extend(["plus", "minus", "total", "generic"].map(String::from));
    let mut rows = Vec::new();
    let mut data = Vec::new();
    for (j, b) in spec.blocks.iter().enumerate() {
        let mut rng = sample_rng(ctx.cfg.seed, j as u64);
        for i in 0..ctx.cfg.samples {
            let p0 = interior_point(spec, j, ctx.cfg.segments, &mut rng);
            let v = random_unit(b.r, &mut rng);
            let li = line_intersections(b, &p0, &v, spec.t)?;
            let mut row = vec![j.to_string(), i.to_string()];
            let mut pf = floats(&p0);
            pf.resize(rmax, String::new());
            let mut vf = floats(&v);
            vf.resize(rmax, String::new());
            row.extend(pf);
            row.extend(vf);
            row.extend([
                li.per_sheet[0].to_string(),
                li.per_sheet[1].to_string(),
                li.total.to_string(),
                li.generic.to_string(),
            ]);
            rows.push(row);
            data.push(json!({ "block": j, "line": i, "point": p0, "direction": v, "result": li }));
        }
    }
    Ok(Output {
        table: Table { header, rows },
        data: Value::Array(data),
    })
}

fn cmd_membership(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let path = ctx
        .cfg
        .points
        .as_ref()
        .ok_or_else(|| CliError::Usage("membership needs --points".into()))?;
    let pts = read_float_rows(Path::new(path))?;
    check_rows(&pts, spec.d(), "point")?;
    let opts = MembershipOptions {
        tol: ctx.cfg.tol,
        seed: ctx.cfg.seed,
        ..MembershipOptions::default()
    };
    let reports = pts
        .iter()
        .map(|x| membership(spec, x, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let mut header = vec!["index".to_string(), "status".to_string(), "tol".to_string()];
    for j in 0..spec.m() {
        header.push(format!("status{j}"));
        header.push(format!("margin{j}"));
    }
    let status = |s| {
        serde_json::to_value(s)
            .unwrap()
            .as_str()
            .unwrap()
            .to_string()
    };
    let rows = reports
        .iter()
        .enumerate()
        .map(|(i, rep)| {
            let mut row = vec![i.to_string(), status(rep.overall), fmt_f64(rep.tol)];
            for b in &rep.blocks {
                row.push(status(b.status));
                row.push(fmt_f64(b.margin));
            }
            row
        })
        .collect();
    Ok(Output {
        table: Table { header, rows },
        data: serde_json::to_value(&reports).expect("json"),
    })
}

fn cmd_simulate(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let path = ctx
        .cfg
        .schedule
        .as_ref()
        .ok_or_else(|| CliError::Usage("simulate needs --schedule".into()))?;
    let text = read_text(Path::new(path))?;
    let sched: InputSchedule = serde_json::from_str(&text)
        .map_err(|e| CliError::Reach(ReachError::InvalidSchedule(format!("{path}: {e}"))))?;
    let x = simulate_endpoint(spec, &sched)?;
    Ok(Output {
        table: Table {
            header: numbered("x", spec.d()),
            rows: vec![floats(&x)],
        },
        data: json!({ "x": x }),
    })
}

fn cloud_input_set(spec: &SystemSpec) -> InputSet {
    spec.input_set.clone().unwrap_or_else(|| InputSet::Box {
        lower: spec.blocks.iter().map(|b| b.alpha).collect(),
        upper: spec.blocks.iter().map(|b| b.beta).collect(),
    })
}

fn cmd_cloud(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let cloud = random_cloud(
        spec,
        &cloud_input_set(spec),
        ctx.cfg.segments,
        ctx.cfg.samples,
        ctx.cfg.seed,
    )?;
    let rows = cloud.iter().map(|x| floats(x)).collect();
    Ok(Output {
        table: Table {
            header: numbered("x", spec.d()),
            rows,
        },
        data: json!({ "points": cloud }),
    })
}

fn cmd_audit(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let cloud = match &ctx.cfg.points {
        Some(p) => read_float_rows(Path::new(p))?,
        None => random_cloud(
            spec,
            &cloud_input_set(spec),
            ctx.cfg.segments,
            ctx.cfg.samples,
            ctx.cfg.seed,
        )?,
    };
    check_rows(&cloud, spec.d(), "point")?;
    let plan = match ctx.cfg.method {
        AuditMethod::Optimized => DirectionPlan::Optimized,
        AuditMethod::Sampled => DirectionPlan::Sampled {
            n: ctx.cfg.directions,
            seed: ctx.cfg.seed,
        },
    };
    let tol = ctx.cfg.tol.unwrap_or(1e-9);
    let rep = containment_audit(&cloud, spec, &plan, tol)?;
    let rows = rep
        .margins
        .iter()
        .enumerate()
        .map(|(i, m)| vec![i.to_string(), fmt_f64(*m), (*m < -tol).to_string()])
        .collect();
    let data = json!({
        "n_samples": rep.n_samples,
        "n_inside": rep.n_inside,
        "n_violations": rep.n_violations,
        "max_violation": rep.max_violation,
        "worst_index": rep.worst_index,
        "tol": rep.tol,
        "plan": plan,
        "support_gaps": rep.support_gaps,
    });
    Ok(Output {
        table: Table {
            header: ["index", "margin", "violation"].map(String::from).to_vec(),
            rows,
        },
        data,
    })
}

fn cmd_volume(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let rep = mc_volume(spec, ctx.cfg.samples, ctx.cfg.seed);
    let joint = mc_volume_joint(spec, ctx.cfg.samples, ctx.cfg.seed);
    let mut rows: Vec<Vec<String>> = rep
        .blocks
        .iter()
        .map(|b| {
            vec![
                b.block.to_string(),
                fmt_f64(b.volume),
                fmt_f64(b.std_error),
                fmt_f64(b.box_volume),
                b.accepted.to_string(),
                b.samples.to_string(),
            ]
        })
        .collect();
    rows.push(vec![
        "product".into(),
        fmt_f64(rep.total),
        fmt_f64(rep.total_std_error),
        String::new(),
        String::new(),
        String::new(),
    ]);
    rows.push(vec![
        "joint".into(),
        fmt_f64(joint.volume),
        fmt_f64(joint.std_error),
        fmt_f64(joint.box_volume),
        joint.accepted.to_string(),
        joint.samples.to_string(),
    ]);
    let header = [
        "block",
        "volume",
        "std_error",
        "box_volume",
        "accepted",
        "samples",
    ]
    .map(String::from)
    .to_vec();
    let data = json!({
        "blocks": rep.blocks,
        "product": { "volume": rep.total, "std_error": rep.total_std_error },
        "joint": {
            "volume": joint.volume,
            "std_error": joint.std_error,
            "box_volume": joint.box_volume,
            "accepted": joint.accepted,
            "samples": joint.samples,
        },
    });
    Ok(Output {
        table: Table { header, rows },
        data,
    })
}

fn cmd_bench(ctx: &Ctx) -> CliResult<Output> {
    let spec = ctx.spec()?;
    let rep = run_bench(spec, ctx.cfg.samples, ctx.cfg.seed)?;
    let rows = rep
        .timings
        .iter()
        .map(|t| {
            vec![
                t.name.clone(),
                t.count.to_string(),
                fmt_f64(t.seconds),
                fmt_f64(t.ns_per_op),
            ]
        })
        .collect();
    Ok(Output {
        table: Table {
            header: ["name", "count", "seconds", "ns_per_op"]
                .map(String::from)
                .to_vec(),
            rows,
        },
        data: serde_json::to_value(&rep).expect("json"),
    })
}

fn configure_threads() {
    if let Some(n) = std::env::var("REACH_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool built earlier in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn execute(args: Args) -> CliResult<Vec<u8>> {
    let cfg = RunConfig::from_args(&args);
    let spec = match &args.spec {
        Some(path) => {
            let s = SystemSpec::from_json(&read_text(path)?)?;
            Some(match args.t {
                Some(t) => s.at_time(t).map_err(|e| match e {
                    ReachError::InvalidSpec(m) => ReachError::InvalidSpec(format!("--t: {m}")),
                    other => other,
                })?,
                None => s,
            })
        }
        None => None,
    };
    let ctx = Ctx { cfg, spec };
    let out = match ctx.cfg.command {
        Command::Support => cmd_support(&ctx)?,
        Command::Boundary => cmd_boundary(&ctx)?,
        Command::Implicit => cmd_implicit(&ctx)?,
        Command::Lines => cmd_lines(&ctx)?,
        Command::Membership => cmd_membership(&ctx)?,
        Command::Simulate => cmd_simulate(&ctx)?,
        Command::Cloud => cmd_cloud(&ctx)?,
        Command::Audit => cmd_audit(&ctx)?,
        Command::Volume => cmd_volume(&ctx)?,
        Command::Bench => cmd_bench(&ctx)?,
    };
    let bytes = render(&ctx, out)?;
    match &args.out {
        Some(path) => {
            fs::write(path, &bytes)?;
            Ok(Vec::new())
        }
        None => Ok(bytes),
    }
}

/// Runs the command line `argv` (program name first), writing results to
/// `stdout` and a JSON error record to `stderr`. Returns the exit status.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    return 0;
                }
                _ => 2,
            };
            let rec = json!({ "error": "usage", "message": e.to_string(), "exit_code": code });
            let _ = writeln!(stderr, "{rec}");
            return code;
        }
    };
    configure_threads();
    match execute(args) {
        Ok(bytes) => match stdout.write_all(&bytes).and_then(|_| stdout.flush()) {
            Ok(()) => 0,
            Err(_) => 1,
        },
        Err(e) => {
            let code = e.exit_code();
            let rec = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code });
            let _ = writeln!(stderr, "{rec}");
            code
        }
    }
}

/// Entry point for the binary.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
