mod curve_io;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;

use frechet_core::freespace::{frechet_value_with, FrechetOptions};
use frechet_core::permute::{build_permutation, kseg_build};
use frechet_core::segquery::SegQueryIndex;
use frechet_core::shortcut::{shortcut_frechet, Witness};
use frechet_core::simplify::simplify_mu;
use frechet_core::{CurvePos, Point, Polyline, Segment};

use curve_io::{emit_curve, parse_curve, parse_numbers};

/// Fréchet distances, shortcut Fréchet distances, simplification and
/// subcurve queries for polygonal curves.
#[derive(Parser, Debug)]
#[command(name = "frechet", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classic Fréchet distance of two curves.
    #[command(group(ArgGroup::new("precision").args(["exact", "tol"])))]
    Frechet {
        a: PathBuf,
        b: PathBuf,
        /// Always search the critical values, whatever the curve sizes.
        #[arg(long)]
        exact: bool,
        /// Find the value by bisection to this tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// (3+ε)-approximate shortcut Fréchet distance from A to shortcut curves of B.
    ShortcutFrechet {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long)]
        json: bool,
        /// Also print the shortcut curve on stderr (JSON output always has it).
        #[arg(long)]
        witness: bool,
    },
    /// Simplify a curve by distance threshold or vertex budget.
    #[command(group(ArgGroup::new("rule").args(["mu", "k"]).required(true)))]
    Simplify {
        file: PathBuf,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Universal vertex permutation: `rank vertex weight` per line.
    Permute {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Batch of subcurve queries against one curve.
    #[command(group(ArgGroup::new("mode").args(["eps", "kseg"])))]
    Query {
        file: PathBuf,
        /// Records `ua_edge ua_t ub_edge ub_t` followed by `p` and `q`
        /// (segment mode) or nothing (k-segment mode).
        #[arg(long)]
        queries: PathBuf,
        /// Accuracy of segment queries.
        #[arg(long)]
        eps: Option<f64>,
        /// File with one query curve per line, coordinates flattened.
        #[arg(long)]
        kseg: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

/// How a failure maps to an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Input,
    Usage,
    Internal,
}

impl Kind {
    fn code(self) -> u8 {
        match self {
            Kind::Input => 2,
            Kind::Usage => 3,
            Kind::Internal => 4,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Input => "input error",
            Kind::Usage => "usage error",
            Kind::Internal => "internal error",
        })
    }
}

trait Tag<T> {
    fn tag(self, kind: Kind) -> Result<T>;
}

impl<T, E: Into<anyhow::Error>> Tag<T> for std::result::Result<T, E> {
    fn tag(self, kind: Kind) -> Result<T> {
        self.map_err(|e| e.into().context(kind))
    }
}

fn usage(msg: String) -> anyhow::Error {
    anyhow!(msg).context(Kind::Usage)
}

fn read_curve(path: &Path) -> Result<Polyline> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .tag(Kind::Input)?;
    parse_curve(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .tag(Kind::Input)
}

fn read_pair(a: &Path, b: &Path) -> Result<(Polyline, Polyline)> {
    let x = read_curve(a)?;
    let y = read_curve(b)?;
    if x.dim() != y.dim() {
        return Err(usage(format!(
            "dimension mismatch: {} has {}, {} has {}",
            a.display(),
            x.dim(),
            b.display(),
            y.dim()
        )));
    }
    for (p, z) in [(a, &x), (b, &y)] {
        if z.len() < 2 {
            bail!(anyhow!("{} needs at least 2 vertices", p.display()).context(Kind::Input));
        }
    }
    Ok((x, y))
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let s = serde_json::to_string(v).tag(Kind::Internal)?;
    println!("{s}");
    Ok(())
}

fn coords(z: &Polyline) -> Vec<Vec<f64>> {
    z.vertices().iter().map(|p| p.coords().to_vec()).collect()
}

#[derive(Serialize)]
struct WitnessJson {
    kept_intervals: Vec<(usize, usize)>,
    shortcuts: Vec<(usize, usize)>,
    matching_breakpoints: Vec<(f64, f64)>,
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        Self {
            kept_intervals: w.kept_intervals.clone(),
            shortcuts: w.shortcuts.clone(),
            matching_breakpoints: w.matching_breakpoints.iter().map(|p| (p.x, p.y)).collect(),
        }
    }
}

#[derive(Serialize)]
struct ShortcutJson {
    value: f64,
    eps: f64,
    witness: WitnessJson,
}

#[derive(Serialize)]
struct PermRow {
    rank: usize,
    vertex: usize,
    /// `None` for the two endpoints.
    weight: Option<f64>,
}

fn cmd_frechet(a: &Path, b: &Path, exact: bool, tol: Option<f64>, json: bool) -> Result<()> {
    let (x, y) = read_pair(a, b)?;
    let mut opts = FrechetOptions::default();
    if exact {
        opts.exact_cap = usize::MAX;
    }
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(format!("--tol must be positive, got {t}")));
        }
        opts = FrechetOptions {
            exact_cap: 0,
            tol: t,
        };
    }
    let v = frechet_value_with(&x, &y, opts);
    if json {
        print_json(&serde_json::json!({ "value": v }))
    } else {
        println!("{v}");
        Ok(())
    }
}

fn cmd_shortcut(a: &Path, b: &Path, eps: f64, json: bool, witness: bool) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(usage(format!("--eps must be positive, got {eps}")));
    }
    let (x, y) = read_pair(a, b)?;
    let r = shortcut_frechet(&x, &y, eps).tag(Kind::Internal)?;
    if json {
        return print_json(&ShortcutJson {
            value: r.value,
            eps: r.eps,
            witness: (&r.witness).into(),
        });
    }
    println!("{}", r.value);
    if witness {
        eprintln!("kept vertices: {:?}", r.witness.vertices);
        eprintln!("shortcuts: {:?}", r.witness.shortcuts);
    }
    Ok(())
}

fn cmd_simplify(file: &Path, mu: Option<f64>, k: Option<usize>, json: bool) -> Result<()> {
    let z = read_curve(file)?;
    let (curve, kept, delta) = match (mu, k) {
        (Some(mu), None) => {
            if !(mu >= 0.0 && mu.is_finite()) {
                return Err(usage(format!("--mu must be nonnegative, got {mu}")));
            }
            let s = simplify_mu(&z, mu);
            (s.curve, s.kept_indices, None)
        }
        (None, Some(k)) => {
            if k < 2 {
                return Err(usage(format!("--k must be at least 2, got {k}")));
            }
            let perm = build_permutation(&z).tag(Kind::Internal)?;
            let s = perm.extract_spine(k).tag(Kind::Internal)?;
            (s.curve, s.indices, Some(s.delta))
        }
        _ => return Err(usage("give exactly one of --mu and --k".to_string())),
    };
    if json {
        let mut v = serde_json::json!({ "curve": coords(&curve), "kept_indices": kept });
        if let Some(d) = delta {
            v["delta"] = serde_json::json!(d);
        }
        return print_json(&v);
    }
    print!("{}", emit_curve(&curve));
    if let Some(d) = delta {
        eprintln!("delta {d}");
    }
    Ok(())
}

fn cmd_permute(file: &Path, json: bool) -> Result<()> {
    let z = read_curve(file)?;
    let perm = build_permutation(&z).tag(Kind::Internal)?;
    let rows: Vec<PermRow> = perm
        .order
        .iter()
        .enumerate()
        .map(|(i, &v)| PermRow {
            rank: i + 1,
            vertex: v,
            weight: perm.weight(i + 1),
        })
        .collect();
    if json {
        return print_json(&rows);
    }
    for r in rows {
        match r.weight {
            Some(w) => println!("{} {} {}", r.rank, r.vertex, w),
            None => println!("{} {} inf", r.rank, r.vertex),
        }
    }
    Ok(())
}

struct Record {
    line: usize,
    u: CurvePos,
    v: CurvePos,
    rest: Vec<f64>,
}

fn read_records(path: &Path, z: &Polyline) -> Result<Vec<Record>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .tag(Kind::Input)?;
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let Some(nums) = parse_numbers(raw, line).tag(Kind::Input)? else {
            continue;
        };
        let bad =
            |msg: &str| anyhow!("{}: line {line}: {msg}", path.display()).context(Kind::Input);
        if nums.len() < 4 {
            return Err(bad("expected `ua_edge ua_t ub_edge ub_t ...`"));
        }
        let pos = |e: f64, t: f64| {
            if e < 0.0 || e.fract() != 0.0 {
                return Err(bad("edge index must be a nonnegative integer"));
            }
            let p = CurvePos::new(e as usize, t);
            z.check_pos(p).map_err(|e| bad(&e.to_string()))?;
            Ok(p)
        };
        let u = pos(nums[0], nums[1])?;
        let v = pos(nums[2], nums[3])?;
        if u.param() > v.param() {
            return Err(bad("first position is after the second"));
        }
        out.push(Record {
            line,
            u,
            v,
            rest: nums[4..].to_vec(),
        });
    }
    Ok(out)
}

fn read_query_curves(path: &Path, dim: usize) -> Result<Vec<Polyline>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .tag(Kind::Input)?;
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let Some(nums) = parse_numbers(raw, k + 1).tag(Kind::Input)? else {
            continue;
        };
        if nums.len() % dim != 0 {
            bail!(anyhow!(
                "{}: line {}: coordinate count is not a multiple of {dim}",
                path.display(),
                k + 1
            )
            .context(Kind::Input));
        }
        let pts = nums
            .chunks(dim)
            .map(Point::new)
            .collect::<std::result::Result<Vec<_>, _>>()
            .tag(Kind::Input)?;
        out.push(Polyline::new(pts).tag(Kind::Input)?);
    }
    Ok(out)
}

fn cmd_query(
    file: &Path,
    queries: &Path,
    eps: Option<f64>,
    kseg: Option<&Path>,
    json: bool,
) -> Result<()> {
    let z = read_curve(file)?;
    if z.len() < 2 {
        bail!(anyhow!("{} needs at least 2 vertices", file.display()).context(Kind::Input));
    }
    let records = read_records(queries, &z)?;
    let d = z.dim();
    let mut values = Vec::with_capacity(records.len());
    if let Some(qpath) = kseg {
        let curves = read_query_curves(qpath, d)?;
        if curves.len() != records.len() {
            return Err(usage(format!(
                "{} records but {} query curves",
                records.len(),
                curves.len()
            )));
        }
        let idx = kseg_build(&z).tag(Kind::Internal)?;
        for (r, q) in records.iter().zip(&curves) {
            if !r.rest.is_empty() {
                bail!(anyhow!(
                    "{}: line {}: unexpected segment in k-segment mode",
                    queries.display(),
                    r.line
                )
                .context(Kind::Input));
            }
            values.push(idx.query(r.u, r.v, q).tag(Kind::Internal)?);
        }
    } else {
        let eps = eps.unwrap_or(0.2);
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(usage(format!("--eps must lie in (0, 1], got {eps}")));
        }
        let idx = SegQueryIndex::build(&z, eps).tag(Kind::Internal)?;
        for r in &records {
            if r.rest.len() != 2 * d {
                bail!(anyhow!(
                    "{}: line {}: expected two points of dimension {d}",
                    queries.display(),
                    r.line
                )
                .context(Kind::Input));
            }
            let p = Point::new(&r.rest[..d]).tag(Kind::Input)?;
            let q = Point::new(&r.rest[d..]).tag(Kind::Input)?;
            let seg = Segment::new(p, q).tag(Kind::Input)?;
            values.push(idx.query(r.u, r.v, &seg).tag(Kind::Internal)?);
        }
    }
    if json {
        return print_json(&serde_json::json!({ "values": values }));
    }
    for v in values {
        println!("{v}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Frechet {
            a,
            b,
            exact,
            tol,
            json,
        } => cmd_frechet(&a, &b, exact, tol, json),
        Cmd::ShortcutFrechet {
            a,
            b,
            eps,
            json,
            witness,
        } => cmd_shortcut(&a, &b, eps, json, witness),
        Cmd::Simplify { file, mu, k, json } => cmd_simplify(&file, mu, k, json),
        Cmd::Permute { file, json } => cmd_permute(&file, json),
        Cmd::Query {
            file,
            queries,
            eps,
            kseg,
            json,
        } => cmd_query(&file, &queries, eps, kseg.as_deref(), json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(Kind::Usage.code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.downcast_ref::<Kind>().copied().unwrap_or(Kind::Internal);
            let causes: Vec<String> = e.chain().skip(1).map(|c| c.to_string()).collect();
            eprintln!("frechet: {kind}: {}", causes.join(": "));
            ExitCode::from(kind.code())
        }
    }
}
