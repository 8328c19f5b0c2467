//! `ising-iom`: verification suites and tables for the critical Ising
//! transfer matrix.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure,
//! 2 on a usage error. Flags may also be given as `ISING_<FLAG>`
//! environment variables; flags win.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ising_iom::characters::{
    char_bosonic, char_bruteforce, char_fermionic, compare_limit, DiagnosticContext, QSeries,
    Sector, MAX_LIMIT_CUTOFF,
};
use ising_iom::exact::{format_rational, rat_int};
use ising_iom::iom::{continuum_iom, iom_record, moment_sum};
use ising_iom::operator::real_spectrum;
use ising_iom::spectrum::{enumerate_states, SpectrumState, SPECTRUM_TOL};
use ising_iom::tl::iom_even_per_site;
use ising_iom::transfer::build_transfer_x;
use ising_iom::verify::{self, round_sig, Params, Suite, DEFAULT_CUTOFF};

#[derive(Parser, Debug)]
#[command(
    name = "ising-iom",
    version,
    about = "Critical Ising transfer matrix: checks and tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and emit a report.
    Verify(VerifyArgs),
    /// Factorized spectrum of T(x), one row per state.
    Spectrum(SpectrumArgs),
    /// Integral-of-motion eigenvalues and their large-L split.
    Iom(IomArgs),
    /// Finitized and infinite-size characters.
    Characters(CharacterArgs),
    /// Projected partition functions against Z_div times the character.
    Diagnostic(DiagnosticArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, env = "ISING_FORMAT", value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, env = "ISING_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, env = "ISING_SUITE", value_parser = parse_suite)]
    suite: Suite,
    #[arg(long = "L", env = "ISING_L", default_value_t = 4)]
    sites: usize,
    #[arg(long, env = "ISING_X", default_value_t = 0.5)]
    x: f64,
    #[arg(long, env = "ISING_N", default_value_t = 6)]
    n: usize,
    #[arg(long, env = "ISING_DELTA")]
    delta: Option<u8>,
    #[arg(long, env = "ISING_SECTOR", value_parser = parse_sector)]
    sector: Option<Sector>,
    #[arg(long, env = "ISING_CUTOFF", default_value_t = DEFAULT_CUTOFF)]
    cutoff: u32,
    #[arg(long, env = "ISING_RTOL")]
    rtol: Option<f64>,
    /// `N` in q = exp(4 pi M x / N); defaults to 2L.
    #[arg(long = "N", env = "ISING_COLUMNS")]
    columns: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long = "L", env = "ISING_L", default_value_t = 2)]
    sites: usize,
    #[arg(long, env = "ISING_X", default_value_t = 0.5)]
    x: f64,
    #[arg(long, env = "ISING_RTOL", default_value_t = SPECTRUM_TOL)]
    rtol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct IomArgs {
    #[arg(long = "L", env = "ISING_L", default_value_t = 8)]
    sites: usize,
    /// Highest order n of A_{2n-1} and A_{2n}.
    #[arg(long, env = "ISING_N", default_value_t = 3)]
    n: usize,
    /// Parts of the state, comma separated. Defaults to the empty partition.
    #[arg(long, value_delimiter = ',')]
    partition: Vec<String>,
    /// Every state instead of the selected partitions (L <= 12).
    #[arg(long)]
    all_states: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct CharacterArgs {
    #[arg(long = "L", env = "ISING_L", default_value_t = 4)]
    sites: usize,
    #[arg(long, env = "ISING_DELTA")]
    delta: Option<u8>,
    #[arg(long, env = "ISING_SECTOR", value_parser = parse_sector)]
    sector: Option<Sector>,
    /// Highest retained exponent, in half-steps.
    #[arg(long, env = "ISING_CUTOFF", default_value_t = DEFAULT_CUTOFF)]
    cutoff: u32,
    /// Infinite-size series against the reference coefficients.
    #[arg(long)]
    limit: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct DiagnosticArgs {
    #[arg(long = "L", env = "ISING_L", default_value_t = 6)]
    sites: usize,
    #[arg(long, env = "ISING_X", default_value_t = 0.1)]
    x: f64,
    /// Number of rows; repeat or comma separate to scan.
    #[arg(long = "M", value_delimiter = ',', default_values_t = [4, 8])]
    rows: Vec<usize>,
    /// `N` in q = exp(4 pi M x / N); repeat to scan. Defaults to 2L.
    #[arg(long = "N", value_delimiter = ',')]
    columns: Vec<f64>,
    #[command(flatten)]
    output: Output,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: ising_iom::Error| e.to_string())
}

fn parse_sector(s: &str) -> Result<Sector, String> {
    s.parse().map_err(|e: ising_iom::Error| e.to_string())
}

/// Outcome of a command: verification failure or a usage error.
enum Failure {
    Verification,
    Usage(String),
}

impl From<ising_iom::Error> for Failure {
    fn from(e: ising_iom::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn sink(output: &Output) -> io::Result<Box<dyn Write>> {
    Ok(match &output.out {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(output: &Output, value: &T) -> CmdResult {
    let mut w = sink(output)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit_csv<T: Serialize>(output: &Output, rows: &[T]) -> CmdResult {
    let mut w = csv::Writer::from_writer(sink(output)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn emit_text(output: &Output, text: &str) -> CmdResult {
    let mut w = sink(output)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn verdict(ok: bool) -> CmdResult {
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let params = Params {
        sites: args.sites,
        x: args.x,
        n: args.n,
        delta: args.delta,
        sector: args.sector,
        cutoff: args.cutoff,
        rtol: args.rtol,
        columns: args.columns,
    };
    let report = verify::run(args.suite, &params)?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(&args.output, &report)?,
        Format::Csv => emit_csv(&args.output, &report.checks)?,
        Format::Text => {
            let mut text = String::new();
            for c in &report.checks {
                let mark = if c.pass { "pass" } else { "FAIL" };
                text += &format!("{mark}  {:<44} {:.3e} <= {:.1e}\n", c.id, c.residual, c.tol);
            }
            text += &format!("{}: {:?}\n", report.suite.name(), report.status);
            emit_text(&args.output, &text)?;
        }
    }
    for c in report.failures() {
        eprintln!(
            "failed: {} (residual {:.3e}, tol {:.1e})",
            c.id, c.residual, c.tol
        );
    }
    verdict(report.passed())
}

fn partition_label(parts: &[usize]) -> String {
    let inner: Vec<String> = parts.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

#[derive(Serialize)]
struct SpectrumRow {
    partition: String,
    p: usize,
    r: i8,
    delta: u8,
    scaled_eigenvalue: f64,
    eigenvalue: f64,
    residual: f64,
}

fn cmd_spectrum(args: &SpectrumArgs) -> CmdResult {
    if !(2..=9).contains(&args.sites) {
        return Err(Failure::Usage(format!("--L {} outside 2..=9", args.sites)));
    }
    let (l, x) = (args.sites, args.x);
    let mut t = build_transfer_x(l, x)?;
    t.scale_mut(x.powi(l as i32) / 4f64.powi(l as i32));
    let numeric = real_spectrum(&t, SPECTRUM_TOL * t.frobenius_norm())?;
    let states = enumerate_states(l)?;
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| {
        states[a]
            .scaled_eigenvalue(x)
            .total_cmp(&states[b].scaled_eigenvalue(x))
    });
    let mut residual = vec![0.0; states.len()];
    for (rank, &i) in order.iter().enumerate() {
        residual[i] = (numeric[rank] - states[i].scaled_eigenvalue(x)).abs();
    }
    let rows: Vec<SpectrumRow> = states
        .iter()
        .zip(&residual)
        .map(|(s, &res)| {
            Ok(SpectrumRow {
                partition: partition_label(s.partition()),
                p: s.len(),
                r: s.r(),
                delta: s.delta(),
                scaled_eigenvalue: round_sig(s.scaled_eigenvalue(x)),
                eigenvalue: round_sig(s.eigenvalue(x)?),
                residual: round_sig(res),
            })
        })
        .collect::<Result<_, ising_iom::Error>>()?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Csv => emit_csv(&args.output, &rows)?,
        _ => emit_json(&args.output, &rows)?,
    }
    verdict(residual.iter().all(|&r| r <= args.rtol))
}

#[derive(Serialize)]
struct IomRow {
    partition: String,
    p: usize,
    r: i8,
    delta: u8,
    n: usize,
    a_odd: f64,
    a_even: f64,
    /// Exact `A_{2n}` when `L > n`.
    a_even_exact: String,
    divergent: f64,
    finite: f64,
    /// `(2L/pi)^{2n-1}` times the finite part.
    scaled_finite: f64,
    alpha_times_i: String,
    alpha: String,
    i_estimate: f64,
}

#[derive(Serialize)]
struct MomentRow {
    n: usize,
    m: usize,
    value: String,
}

#[derive(Serialize)]
struct IomTable {
    #[serde(rename = "L")]
    sites: usize,
    rows: Vec<IomRow>,
    moments: Vec<MomentRow>,
}

fn selected_states(args: &IomArgs) -> Result<Vec<SpectrumState>, Failure> {
    if args.all_states {
        return Ok(enumerate_states(args.sites)?);
    }
    if args.partition.is_empty() {
        return Ok(vec![SpectrumState::new_unbounded(args.sites, vec![])?]);
    }
    let parts: Vec<usize> = args
        .partition
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad partition part {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(vec![SpectrumState::new_unbounded(args.sites, parts)?])
}

fn cmd_iom(args: &IomArgs) -> CmdResult {
    if !(1..=6).contains(&args.n) {
        return Err(Failure::Usage(format!("--n {} outside 1..=6", args.n)));
    }
    let l = args.sites;
    let states = selected_states(args)?;
    let mut rows = Vec::new();
    for s in &states {
        for n in 1..=args.n {
            let rec = iom_record(s, n);
            let c = continuum_iom(s.partition(), s.delta(), n);
            let exact = if l > n {
                format_rational(&(iom_even_per_site(n) * rat_int((l as i64).into())))
            } else {
                String::new()
            };
            let scale = (2.0 * l as f64 / std::f64::consts::PI).powi(2 * n as i32 - 1);
            rows.push(IomRow {
                partition: partition_label(s.partition()),
                p: s.len(),
                r: s.r(),
                delta: s.delta(),
                n,
                a_odd: round_sig(rec.a_odd),
                a_even: round_sig(rec.a_even),
                a_even_exact: exact,
                divergent: round_sig(rec.divergent),
                finite: round_sig(rec.finite),
                scaled_finite: round_sig(rec.finite * scale),
                alpha_times_i: c.alpha_times_i,
                alpha: c.alpha,
                i_estimate: round_sig(c.i_estimate),
            });
        }
    }
    let moments: Vec<MomentRow> = (1..=args.n.max(2))
        .flat_map(|n| (1..=n).map(move |m| (n, m)))
        .map(|(n, m)| MomentRow {
            n,
            m,
            value: moment_sum(n, m).to_string(),
        })
        .collect();
    let ok = moments.iter().all(|r| r.m == r.n || r.value == "0")
        && rows.iter().all(|r| {
            r.a_even_exact.is_empty()
                || (r.a_even - r.a_even_exact.parse::<f64>().unwrap_or(f64::NAN)).abs()
                    <= 1e-8 * r.a_even.abs()
        });
    match args.output.format.unwrap_or(Format::Json) {
        Format::Csv => emit_csv(&args.output, &rows)?,
        _ => emit_json(
            &args.output,
            &IomTable {
                sites: l,
                rows,
                moments,
            },
        )?,
    }
    verdict(ok)
}

#[derive(Serialize)]
struct SeriesEntry {
    #[serde(rename = "L")]
    sites: Option<usize>,
    delta: u8,
    sector: Sector,
    form: &'static str,
    text: String,
    series: QSeries,
    first_difference: Option<u32>,
}

fn exponent_label(doubled: u32) -> String {
    if doubled.is_multiple_of(2) {
        format!("q^{}", doubled / 2)
    } else {
        format!("q^({doubled}/2)")
    }
}

fn cmd_characters(args: &CharacterArgs) -> CmdResult {
    if args.cutoff > MAX_LIMIT_CUTOFF {
        return Err(Failure::Usage(format!(
            "--cutoff {} above {MAX_LIMIT_CUTOFF}",
            args.cutoff
        )));
    }
    if args.delta.is_some_and(|d| d > 1) {
        return Err(Failure::Usage("--delta must be 0 or 1".into()));
    }
    let deltas = args.delta.map_or(vec![0, 1], |d| vec![d]);
    let sectors = args.sector.map_or(Sector::BOTH.to_vec(), |s| vec![s]);
    let mut entries = Vec::new();
    let mut ok = true;
    for &delta in &deltas {
        for &sector in &sectors {
            if args.limit {
                let c = compare_limit(delta, sector)?;
                ok &= c.matches;
                for (form, series) in [("limit", c.computed), ("reference", c.reference)] {
                    entries.push(SeriesEntry {
                        sites: None,
                        delta,
                        sector,
                        form,
                        text: format!("{series} + ..."),
                        series,
                        first_difference: c.first_difference,
                    });
                }
            } else {
                let fermionic = char_fermionic(args.sites, delta, sector, args.cutoff)?;
                let bosonic = char_bosonic(args.sites, delta, sector, args.cutoff)?;
                let brute = char_bruteforce(args.sites, delta, sector, args.cutoff)?;
                let diff = [
                    fermionic.first_difference(&bosonic),
                    fermionic.first_difference(&brute),
                ]
                .into_iter()
                .flatten()
                .min();
                ok &= diff.is_none();
                for (form, series) in [
                    ("fermionic", fermionic),
                    ("bosonic", bosonic),
                    ("bruteforce", brute),
                ] {
                    entries.push(SeriesEntry {
                        sites: Some(args.sites),
                        delta,
                        sector,
                        form,
                        text: series.to_string(),
                        series,
                        first_difference: diff,
                    });
                }
            }
        }
    }
    match args.output.format.unwrap_or(Format::Text) {
        Format::Json => emit_json(&args.output, &entries)?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                #[serde(rename = "L")]
                sites: Option<usize>,
                delta: u8,
                sector: Sector,
                form: &'a str,
                series: &'a str,
                first_difference: Option<u32>,
            }
            let rows: Vec<Row<'_>> = entries
                .iter()
                .map(|e| Row {
                    sites: e.sites,
                    delta: e.delta,
                    sector: e.sector,
                    form: e.form,
                    series: &e.text,
                    first_difference: e.first_difference,
                })
                .collect();
            emit_csv(&args.output, &rows)?;
        }
        Format::Text => {
            let single = deltas.len() == 1 && sectors.len() == 1 && !args.limit;
            let mut text = String::new();
            if single && ok {
                text = format!("{}\n", entries[0].text);
            } else {
                for e in &entries {
                    text += &format!(
                        "delta={} {:<5} {:<10} {}\n",
                        e.delta, e.sector, e.form, e.text
                    );
                }
            }
            emit_text(&args.output, &text)?;
        }
    }
    if !ok {
        if let Some(e) = entries.iter().find(|e| e.first_difference.is_some()) {
            let at = e.first_difference.expect("checked above");
            eprintln!(
                "mismatch: delta={} {} first differs at {}",
                e.delta,
                e.sector,
                exponent_label(at)
            );
        }
    }
    verdict(ok)
}

fn cmd_diagnostic(args: &DiagnosticArgs) -> CmdResult {
    let ctx = DiagnosticContext::new(args.sites, args.x)?;
    let columns = if args.columns.is_empty() {
        vec![2.0 * args.sites as f64]
    } else {
        args.columns.clone()
    };
    let mut reports = Vec::new();
    for &n in &columns {
        for &m in &args.rows {
            reports.push(ctx.evaluate(m, n)?);
        }
    }
    let ok = reports
        .iter()
        .all(|r| r.sectors.iter().all(|s| s.relative_deviation <= 1e-6));
    match args.output.format.unwrap_or(Format::Json) {
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "L")]
                sites: usize,
                #[serde(rename = "M")]
                rows: usize,
                #[serde(rename = "N")]
                columns: f64,
                x: f64,
                r: i8,
                sector: Sector,
                delta: u8,
                trace: f64,
                spectral_sum: f64,
                relative_deviation: f64,
                z_div: f64,
                chi: f64,
                ratio: f64,
            }
            let rows: Vec<Row> = reports
                .iter()
                .flat_map(|rep| {
                    rep.sectors.iter().map(move |s| Row {
                        sites: rep.sites,
                        rows: rep.rows,
                        columns: rep.columns,
                        x: rep.x,
                        r: s.r,
                        sector: s.sector,
                        delta: s.delta,
                        trace: round_sig(s.trace),
                        spectral_sum: round_sig(s.spectral_sum),
                        relative_deviation: round_sig(s.relative_deviation),
                        z_div: round_sig(s.z_div),
                        chi: round_sig(s.chi),
                        ratio: round_sig(s.ratio),
                    })
                })
                .collect();
            emit_csv(&args.output, &rows)?;
        }
        Format::Text => {
            let mut text = String::new();
            for rep in &reports {
                for s in &rep.sectors {
                    text += &format!(
                        "L={} M={} N={} {:<5} trace {:.6e} deviation {:.2e} Z_div chi / Z {:.6}\n",
                        rep.sites,
                        rep.rows,
                        rep.columns,
                        s.sector,
                        s.trace,
                        s.relative_deviation,
                        s.ratio
                    );
                }
            }
            emit_text(&args.output, &text)?;
        }
        Format::Json => emit_json(&args.output, &reports)?,
    }
    verdict(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Iom(a) => cmd_iom(a),
        Command::Characters(a) => cmd_characters(a),
        Command::Diagnostic(a) => cmd_diagnostic(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
