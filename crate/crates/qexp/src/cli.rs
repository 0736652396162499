//! The `qexp` binary: every module behind one subcommand, plus `verify`,
//! which runs the acceptance checklist and fails the process on any red
//! criterion.
//!
//! Exit codes: 0 success, 1 domain error (bad base, bad word, out of
//! domain), 2 verification failure, 3 I/O failure. CSV output carries 17
//! significant digits so that emit -> parse -> emit is byte-identical;
//! human-facing lines round for the terminal. `QEXP_THREADS` caps the
//! sampling thread pool.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::base::{solve_base, BasePair};
use crate::cylinders::level_partition;
use crate::density::{invariant_densities, invariant_densities_from_words, DensityPair};
use crate::ergodic::{
    birkhoff_report, chebyshev_gap, count_expansions, mixing_correlation, univoque_fraction,
    CorrelationPoint, SampleReport,
};
use crate::error::{Error, Result};
use crate::maps::{expansion, DigitWord, MapKind, OrbitRecord, Tail};
use crate::stepfn::{fmt_f64, StepFunction};
use crate::transfer::{IterationStep, TransferOperator};
use crate::verify::{self, Profile};

#[derive(Parser)]
#[command(
    name = "qexp",
    version,
    about = "Greedy and lazy double-base expansions, their transfer operators, and invariant densities"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write data output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Data serialization; defaults to json for `base`/`solve-base` and csv
    /// elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Greedy,
    Lazy,
}

impl From<KindArg> for MapKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Greedy => MapKind::Greedy,
            KindArg::Lazy => MapKind::Lazy,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TailArg {
    Zeros,
    Ones,
}

impl From<TailArg> for Tail {
    fn from(t: TailArg) -> Self {
        match t {
            TailArg::Zeros => Tail::Zeros,
            TailArg::Ones => Tail::Ones,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StatArg {
    Birkhoff,
    Gap,
    Univoque,
    Mixing,
    Count,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Desk,
    Ci,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a base pair and print all derived constants.
    Base {
        #[arg(long)]
        q0: f64,
        #[arg(long)]
        q1: f64,
    },
    /// Recover the base pair whose critical points have the given greedy and
    /// lazy expansions (finite words over 0/1 plus constant tails).
    SolveBase {
        /// Greedy expansion of r, e.g. 111.
        #[arg(long)]
        greedy: String,
        #[arg(long, value_enum, default_value_t = TailArg::Zeros)]
        greedy_tail: TailArg,
        /// Lazy expansion of ell, e.g. 00.
        #[arg(long)]
        lazy: String,
        #[arg(long, value_enum, default_value_t = TailArg::Ones)]
        lazy_tail: TailArg,
    },
    /// Orbit and digits of a point under the greedy or lazy map.
    Expand {
        #[arg(long)]
        q0: f64,
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 32)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Greedy)]
        kind: KindArg,
    },
    /// Invariant density as a step-function table.
    Density {
        #[arg(long, required_unless_present = "figure1")]
        q0: Option<f64>,
        #[arg(long, required_unless_present = "figure1")]
        q1: Option<f64>,
        #[arg(long, value_enum, default_value_t = KindArg::Greedy)]
        kind: KindArg,
        /// Truncation depth of the jump-function series.
        #[arg(long, default_value_t = 64)]
        depth: usize,
        /// Preset: the base with critical expansions 1110^inf / 001^inf and
        /// its greedy density (the published three-piece table).
        #[arg(long)]
        figure1: bool,
        /// Also write the density table as CSV to this path.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Also write staircase plot data (x y pairs) to this path.
        #[arg(long, value_name = "PATH")]
        gnuplot: Option<PathBuf>,
    },
    /// Iterate the transfer operator from the uniform density.
    Transfer {
        #[arg(long)]
        q0: f64,
        #[arg(long)]
        q1: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Greedy)]
        kind: KindArg,
        #[arg(long, default_value_t = 60)]
        steps: usize,
    },
    /// Cylinder intervals of one level: domains, images, weights.
    Partition {
        #[arg(long)]
        q0: f64,
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        level: usize,
    },
    /// Sampling statistics: birkhoff, gap, univoque, mixing, count.
    Ergodic {
        #[arg(long)]
        q0: f64,
        #[arg(long)]
        q1: f64,
        #[arg(long, value_enum)]
        stat: StatArg,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Prefix depth (univoque, count).
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Greedy)]
        kind: KindArg,
        /// Orbit length for birkhoff averages.
        #[arg(long, default_value_t = 100_000)]
        orbit: usize,
        /// Point to analyze (count).
        #[arg(long)]
        x: Option<f64>,
        /// Largest lag for mixing correlations.
        #[arg(long, default_value_t = 30)]
        nmax: usize,
        #[arg(long)]
        a_lo: Option<f64>,
        #[arg(long)]
        a_hi: Option<f64>,
        #[arg(long)]
        b_lo: Option<f64>,
        #[arg(long)]
        b_hi: Option<f64>,
    },
    /// Run the acceptance checklist; exits 2 if any criterion fails.
    Verify {
        #[arg(long, value_enum, default_value_t = ProfileArg::Desk)]
        profile: ProfileArg,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Ok(threads) = std::env::var("QEXP_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            match e {
                Error::Io(_) => 3,
                _ => 1,
            }
        }
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => Ok(std::fs::write(path, text)?),
    }
}

fn run(cli: Cli) -> Result<i32> {
    let format = cli.format;
    let output = cli.output;
    match cli.command {
        Command::Base { q0, q1 } => {
            let base = BasePair::new(q0, q1)?;
            emit(&output, &base_text(&base, format.unwrap_or(Format::Json)))?;
        }
        Command::SolveBase {
            greedy,
            greedy_tail,
            lazy,
            lazy_tail,
        } => {
            let wg = DigitWord::parse(&greedy)?;
            let wl = DigitWord::parse(&lazy)?;
            let base = solve_base(&wg, greedy_tail.into(), &wl, lazy_tail.into())?;
            emit(&output, &base_text(&base, format.unwrap_or(Format::Json)))?;
        }
        Command::Expand {
            q0,
            q1,
            x,
            depth,
            kind,
        } => {
            let base = BasePair::new(q0, q1)?;
            let orbit = expansion(&base, x, depth, kind.into())?;
            let text = match format.unwrap_or(Format::Csv) {
                Format::Csv => orbit_to_csv(&orbit),
                Format::Json => orbit_to_json(&orbit),
            };
            emit(&output, &text)?;
        }
        Command::Density {
            q0,
            q1,
            kind,
            depth,
            figure1,
            csv,
            gnuplot,
        } => {
            let (pair, kind) = if figure1 {
                let wg = DigitWord::parse("111")?;
                let wl = DigitWord::parse("00")?;
                let base = solve_base(&wg, Tail::Zeros, &wl, Tail::Ones)?;
                let pair =
                    invariant_densities_from_words(&base, &wg, Tail::Zeros, &wl, Tail::Ones)?;
                (pair, MapKind::Greedy)
            } else {
                let base = BasePair::new(q0.unwrap(), q1.unwrap())?;
                (invariant_densities(&base, depth)?, kind.into())
            };
            let h = pair.density(kind);
            if let Some(path) = &csv {
                emit(&Some(path.clone()), &h.to_csv())?;
            }
            if let Some(path) = &gnuplot {
                emit(&Some(path.clone()), &gnuplot_data(h))?;
            }
            let text = match format.unwrap_or(Format::Csv) {
                Format::Csv => h.to_csv(),
                Format::Json => density_to_json(&pair, kind),
            };
            emit(&output, &text)?;
        }
        Command::Transfer {
            q0,
            q1,
            kind,
            steps,
        } => {
            let base = BasePair::new(q0, q1)?;
            let op = TransferOperator::new(base, kind.into());
            let uniform = StepFunction::constant(base.right(), 1.0 / base.right());
            let trace = op.iterate(&uniform, steps)?;
            let text = match format.unwrap_or(Format::Csv) {
                Format::Csv => trace_to_csv(&trace.steps),
                Format::Json => trace_to_json(&trace.steps),
            };
            emit(&output, &text)?;
        }
        Command::Partition { q0, q1, level } => {
            let base = BasePair::new(q0, q1)?;
            let cylinders = level_partition(&base, level)?;
            let rows: Vec<PartitionRow> = cylinders
                .iter()
                .map(|c| PartitionRow {
                    word: c.word.to_string(),
                    left: c.left,
                    right: c.right,
                    image_right: c.image.right_end(&base),
                    weight: c.weight,
                })
                .collect();
            let text = match format.unwrap_or(Format::Csv) {
                Format::Csv => partition_to_csv(&rows),
                Format::Json => partition_to_json(&rows),
            };
            emit(&output, &text)?;
        }
        Command::Ergodic {
            q0,
            q1,
            stat,
            seed,
            samples,
            depth,
            kind,
            orbit,
            x,
            nmax,
            a_lo,
            a_hi,
            b_lo,
            b_hi,
        } => {
            let base = BasePair::new(q0, q1)?;
            let text = match stat {
                StatArg::Birkhoff => {
                    let report = birkhoff_report(&base, kind.into(), orbit, samples, seed)?;
                    report_text(&report, format.unwrap_or(Format::Csv))
                }
                StatArg::Univoque => {
                    let report = univoque_fraction(&base, depth, samples, seed)?;
                    report_text(&report, format.unwrap_or(Format::Csv))
                }
                StatArg::Gap => {
                    let pair = density_for(&base, depth)?;
                    let (g, mid, l) = chebyshev_gap(&pair)?;
                    gap_text(g, mid, l, format.unwrap_or(Format::Csv))
                }
                StatArg::Mixing => {
                    let pair = density_for(&base, depth)?;
                    let half = base.r() / 2.0;
                    let a = (a_lo.unwrap_or(0.0), a_hi.unwrap_or(half));
                    let b = (b_lo.unwrap_or(0.0), b_hi.unwrap_or(half));
                    let points = mixing_correlation(&pair, kind.into(), a, b, nmax, samples, seed)?;
                    mixing_text(&points, format.unwrap_or(Format::Csv))
                }
                StatArg::Count => {
                    let x = x.ok_or(Error::Unsupported("--stat count needs --x"))?;
                    let count = count_expansions(&base, x, depth, crate::ergodic::ENUM_CAP)?;
                    count_text(x, depth, count, format.unwrap_or(Format::Csv))
                }
            };
            emit(&output, &text)?;
        }
        Command::Verify { profile, seed } => {
            let profile = match profile {
                ProfileArg::Desk => Profile::Desk,
                ProfileArg::Ci => Profile::Ci,
            };
            let reports = verify::run_all(profile, seed);
            let mut text = String::new();
            let mut failed = 0usize;
            for r in &reports {
                text.push_str(&format!("{r}\n"));
                if !r.passed {
                    failed += 1;
                }
            }
            text.push_str(&format!(
                "{} of {} criteria passed (seed {seed})\n",
                reports.len() - failed,
                reports.len()
            ));
            emit(&output, &text)?;
            return Ok(if failed > 0 { 2 } else { 0 });
        }
    }
    Ok(0)
}

fn density_for(base: &BasePair, depth: usize) -> Result<DensityPair> {
    invariant_densities(base, depth.max(crate::density::depth_for_tail(base, 1e-10)))
}

// ---- serialization helpers (one emitter and one parser per CSV schema) ----

fn base_text(base: &BasePair, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(base).expect("plain struct");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("q0,q1,ell,r,right,greedy_switch,lazy_switch,strict\n");
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_f64(base.q0()),
                fmt_f64(base.q1()),
                fmt_f64(base.ell()),
                fmt_f64(base.r()),
                fmt_f64(base.right()),
                fmt_f64(base.greedy_switch()),
                fmt_f64(base.lazy_switch()),
                base.is_strict()
            ));
            s
        }
    }
}

pub(crate) fn split_rows(text: &str, header: &str) -> Result<Vec<Vec<String>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header {header:?}, got {other:?}"
            )))
        }
    }
    Ok(lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn parse_field<T: std::str::FromStr>(row: &[String], idx: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    row.get(idx)
        .ok_or_else(|| Error::Parse(format!("missing column {idx}")))?
        .parse::<T>()
        .map_err(|e| Error::Parse(format!("column {idx}: {e}")))
}

pub const ORBIT_HEADER: &str = "step,x,digit";

/// CSV rows `(step, x, digit)`; the final row carries the last orbit point
/// with an empty digit column.
pub fn orbit_to_csv(orbit: &OrbitRecord) -> String {
    let mut out = format!("{ORBIT_HEADER}\n");
    for (i, &x) in orbit.points.iter().enumerate() {
        let digit = orbit
            .digits
            .digits()
            .get(i)
            .map_or(String::new(), |d| d.to_string());
        out.push_str(&format!("{},{},{}\n", i, fmt_f64(x), digit));
    }
    out
}

pub fn orbit_rows_from_csv(text: &str) -> Result<Vec<(usize, f64, Option<u8>)>> {
    split_rows(text, ORBIT_HEADER)?
        .iter()
        .map(|row| {
            let digit = match row.get(2).map(String::as_str) {
                Some("") | None => None,
                Some(s) => Some(
                    s.parse::<u8>()
                        .map_err(|e| Error::Parse(format!("digit: {e}")))?,
                ),
            };
            Ok((parse_field(row, 0)?, parse_field(row, 1)?, digit))
        })
        .collect()
}

pub fn orbit_rows_to_csv(rows: &[(usize, f64, Option<u8>)]) -> String {
    let mut out = format!("{ORBIT_HEADER}\n");
    for &(i, x, d) in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            i,
            fmt_f64(x),
            d.map_or(String::new(), |d| d.to_string())
        ));
    }
    out
}

fn orbit_to_json(orbit: &OrbitRecord) -> String {
    let rows: Vec<serde_json::Value> = orbit
        .points
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            serde_json::json!({
                "step": i,
                "x": x,
                "digit": orbit.digits.digits().get(i).copied(),
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&serde_json::json!({
        "kind": orbit.map_kind.to_string(),
        "start": orbit.start,
        "rows": rows,
    }))
    .expect("plain json");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionRow {
    pub word: String,
    pub left: f64,
    pub right: f64,
    pub image_right: f64,
    pub weight: f64,
}

pub const PARTITION_HEADER: &str = "word,left,right,image_right,weight";

pub fn partition_to_csv(rows: &[PartitionRow]) -> String {
    let mut out = format!("{PARTITION_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.word,
            fmt_f64(r.left),
            fmt_f64(r.right),
            fmt_f64(r.image_right),
            fmt_f64(r.weight)
        ));
    }
    out
}

pub fn partition_rows_from_csv(text: &str) -> Result<Vec<PartitionRow>> {
    split_rows(text, PARTITION_HEADER)?
        .iter()
        .map(|row| {
            Ok(PartitionRow {
                word: row
                    .first()
                    .ok_or_else(|| Error::Parse("missing word".into()))?
                    .clone(),
                left: parse_field(row, 1)?,
                right: parse_field(row, 2)?,
                image_right: parse_field(row, 3)?,
                weight: parse_field(row, 4)?,
            })
        })
        .collect()
}

fn partition_to_json(rows: &[PartitionRow]) -> String {
    let items: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "word": r.word,
                "left": r.left,
                "right": r.right,
                "image_right": r.image_right,
                "weight": r.weight,
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&items).expect("plain json");
    s.push('\n');
    s
}

pub const TRACE_HEADER: &str = "n,l1_increment,breakpoint_count,mass_outside_support";

pub fn trace_to_csv(steps: &[IterationStep]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for s in steps {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.n,
            fmt_f64(s.l1_increment),
            s.breakpoint_count,
            fmt_f64(s.mass_outside_support)
        ));
    }
    out
}

pub fn trace_rows_from_csv(text: &str) -> Result<Vec<IterationStep>> {
    split_rows(text, TRACE_HEADER)?
        .iter()
        .map(|row| {
            Ok(IterationStep {
                n: parse_field(row, 0)?,
                l1_increment: parse_field(row, 1)?,
                breakpoint_count: parse_field(row, 2)?,
                mass_outside_support: parse_field(row, 3)?,
            })
        })
        .collect()
}

fn trace_to_json(steps: &[IterationStep]) -> String {
    let items: Vec<serde_json::Value> = steps
        .iter()
        .map(|s| {
            serde_json::json!({
                "n": s.n,
                "l1_increment": s.l1_increment,
                "breakpoint_count": s.breakpoint_count,
                "mass_outside_support": s.mass_outside_support,
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&items).expect("plain json");
    s.push('\n');
    s
}

pub const REPORT_HEADER: &str = "statistic,n_samples,depth,seed,mean,stderr";

pub fn report_to_csv(r: &SampleReport) -> String {
    format!(
        "{REPORT_HEADER}\n{},{},{},{},{},{}\n",
        r.statistic,
        r.n_samples,
        r.depth,
        r.seed,
        fmt_f64(r.mean),
        fmt_f64(r.stderr)
    )
}

/// Parse a single-row report back into a detached record (base-less).
pub fn report_row_from_csv(text: &str) -> Result<(String, usize, usize, u64, f64, f64)> {
    let rows = split_rows(text, REPORT_HEADER)?;
    let row = rows
        .first()
        .ok_or_else(|| Error::Parse("empty report".into()))?;
    Ok((
        row.first()
            .ok_or_else(|| Error::Parse("missing statistic".into()))?
            .clone(),
        parse_field(row, 1)?,
        parse_field(row, 2)?,
        parse_field(row, 3)?,
        parse_field(row, 4)?,
        parse_field(row, 5)?,
    ))
}

pub fn report_row_to_csv(row: &(String, usize, usize, u64, f64, f64)) -> String {
    format!(
        "{REPORT_HEADER}\n{},{},{},{},{},{}\n",
        row.0,
        row.1,
        row.2,
        row.3,
        fmt_f64(row.4),
        fmt_f64(row.5)
    )
}

fn report_text(r: &SampleReport, format: Format) -> String {
    match format {
        Format::Csv => report_to_csv(r),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::json!({
                "statistic": r.statistic,
                "n_samples": r.n_samples,
                "depth": r.depth,
                "seed": r.seed,
                "mean": r.mean,
                "stderr": r.stderr,
            }))
            .expect("plain json");
            s.push('\n');
            s
        }
    }
}

pub const GAP_HEADER: &str = "mean_greedy,midpoint,mean_lazy,margin_greedy,margin_lazy";

fn gap_text(g: f64, mid: f64, l: f64, format: Format) -> String {
    match format {
        Format::Csv => format!(
            "{GAP_HEADER}\n{},{},{},{},{}\n",
            fmt_f64(g),
            fmt_f64(mid),
            fmt_f64(l),
            fmt_f64(mid - g),
            fmt_f64(l - mid)
        ),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&serde_json::json!({
                "mean_greedy": g,
                "midpoint": mid,
                "mean_lazy": l,
                "margin_greedy": mid - g,
                "margin_lazy": l - mid,
            }))
            .expect("plain json");
            s.push('\n');
            s
        }
    }
}

pub fn gap_row_from_csv(text: &str) -> Result<[f64; 5]> {
    let rows = split_rows(text, GAP_HEADER)?;
    let row = rows
        .first()
        .ok_or_else(|| Error::Parse("empty gap row".into()))?;
    Ok([
        parse_field(row, 0)?,
        parse_field(row, 1)?,
        parse_field(row, 2)?,
        parse_field(row, 3)?,
        parse_field(row, 4)?,
    ])
}

pub fn gap_row_to_csv(row: &[f64; 5]) -> String {
    format!(
        "{GAP_HEADER}\n{},{},{},{},{}\n",
        fmt_f64(row[0]),
        fmt_f64(row[1]),
        fmt_f64(row[2]),
        fmt_f64(row[3]),
        fmt_f64(row[4])
    )
}

pub const MIXING_HEADER: &str = "n,value,stderr";

pub fn mixing_rows_from_csv(text: &str) -> Result<Vec<CorrelationPoint>> {
    split_rows(text, MIXING_HEADER)?
        .iter()
        .map(|row| {
            Ok(CorrelationPoint {
                n: parse_field(row, 0)?,
                value: parse_field(row, 1)?,
                stderr: parse_field(row, 2)?,
            })
        })
        .collect()
}

pub fn mixing_rows_to_csv(points: &[CorrelationPoint]) -> String {
    let mut out = format!("{MIXING_HEADER}\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            p.n,
            fmt_f64(p.value),
            fmt_f64(p.stderr)
        ));
    }
    out
}

fn mixing_text(points: &[CorrelationPoint], format: Format) -> String {
    match format {
        Format::Csv => mixing_rows_to_csv(points),
        Format::Json => {
            let items: Vec<serde_json::Value> = points
                .iter()
                .map(|p| serde_json::json!({"n": p.n, "value": p.value, "stderr": p.stderr}))
                .collect();
            let mut s = serde_json::to_string_pretty(&items).expect("plain json");
            s.push('\n');
            s
        }
    }
}

pub const COUNT_HEADER: &str = "x,depth,count";

pub fn count_row_from_csv(text: &str) -> Result<(f64, usize, usize)> {
    let rows = split_rows(text, COUNT_HEADER)?;
    let row = rows
        .first()
        .ok_or_else(|| Error::Parse("empty count row".into()))?;
    Ok((
        parse_field(row, 0)?,
        parse_field(row, 1)?,
        parse_field(row, 2)?,
    ))
}

pub fn count_row_to_csv(row: &(f64, usize, usize)) -> String {
    format!("{COUNT_HEADER}\n{},{},{}\n", fmt_f64(row.0), row.1, row.2)
}

fn count_text(x: f64, depth: usize, count: usize, format: Format) -> String {
    match format {
        Format::Csv => count_row_to_csv(&(x, depth, count)),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(
                &serde_json::json!({"x": x, "depth": depth, "count": count}),
            )
            .expect("plain json");
            s.push('\n');
            s
        }
    }
}

fn density_to_json(pair: &DensityPair, kind: MapKind) -> String {
    let h = pair.density(kind);
    let pieces: Vec<serde_json::Value> = h
        .pieces()
        .map(|(l, r, v)| serde_json::json!({"left": l, "right": r, "value": v}))
        .collect();
    let mut s = serde_json::to_string_pretty(&serde_json::json!({
        "base": pair.base,
        "kind": kind.to_string(),
        "truncation_n": pair.truncation_n,
        "tail_bound_l1": pair.tail_bound_l1,
        "pieces": pieces,
    }))
    .expect("plain json");
    s.push('\n');
    s
}

/// Staircase plot data: two `x value` rows per piece.
fn gnuplot_data(h: &StepFunction) -> String {
    let mut out = String::new();
    for (l, r, v) in h.pieces() {
        out.push_str(&format!(
            "{} {}\n{} {}\n",
            fmt_f64(l),
            fmt_f64(v),
            fmt_f64(r),
            fmt_f64(v)
        ));
    }
    out
}
