use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gatescan::catalog::{Catalog, ScanReport};
use gatescan::driver::{
    count_graph6, decode_line, encode_line, parse_momenta, scan, verify, write_levels, DriverError, InputMode,
    ScanConfig,
};
use gatescan::gatekit::Tolerances;

#[derive(Parser)]
#[command(name = "gatescan", version, about = "Search small graphs for single-qubit scattering gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan every graph and tail attachment in a vertex range.
    Scan(ScanArgs),
    /// Re-solve every catalog entry from its witness.
    Verify {
        catalog: PathBuf,
        /// Also re-solve at double-double precision.
        #[arg(long)]
        extended: bool,
    },
    /// graph6 utilities.
    G6 {
        #[command(subcommand)]
        op: G6Op,
    },
    /// Summarize a catalog (reads counts.json next to it when present).
    Report {
        catalog: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum G6Op {
    /// Edge lists (`n: u-v ...`) to graph6.
    Encode { file: Option<PathBuf> },
    /// graph6 to edge lists.
    Decode { file: Option<PathBuf> },
    /// Graphs per vertex count in a graph6 stream.
    Count { file: Option<PathBuf> },
    /// Every graph on up to N vertices, one per isomorphism class.
    Enumerate {
        #[arg(long)]
        n_max: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Jsonl,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 7)]
    n_max: usize,
    /// Comma-separated multiples of pi, e.g. `pi/4,2pi/3`.
    #[arg(long, default_value = "pi/4,pi/3,pi/2,2pi/3,3pi/4,pi/5,2pi/5,3pi/5,4pi/5")]
    momenta: String,
    #[arg(long)]
    out: PathBuf,
    /// Read graphs from a graph6 file instead of enumerating.
    #[arg(long)]
    graph6: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write a checkpoint after every K graphs.
    #[arg(long, default_value_t = 0)]
    checkpoint_every: u64,
    /// Continue from the checkpoint in the output directory.
    #[arg(long)]
    resume: bool,
    /// Stop after K graphs, leaving a checkpoint.
    #[arg(long)]
    stop_after: Option<u64>,
    #[arg(long)]
    tol_flux: Option<f64>,
    #[arg(long)]
    tol_gate: Option<f64>,
    #[arg(long)]
    tol_axis: Option<f64>,
    #[arg(long)]
    tol_len: Option<f64>,
    #[arg(long)]
    tol_rat: Option<f64>,
    #[arg(long)]
    tol_surd: Option<f64>,
    #[arg(long)]
    stencil_h: Option<f64>,
    #[arg(long)]
    q_max: Option<i64>,
    #[arg(long)]
    coeff_bound: Option<i64>,
}

impl ScanArgs {
    fn config(&self) -> Result<ScanConfig, DriverError> {
        let mut cfg = ScanConfig::new(self.n_max, &self.out);
        cfg.n_min = self.n_min;
        cfg.momenta = parse_momenta(&self.momenta)?;
        cfg.workers = self.workers;
        cfg.checkpoint_every = self.checkpoint_every;
        cfg.resume = self.resume;
        cfg.stop_after = self.stop_after;
        if let Some(p) = &self.graph6 {
            cfg.input = InputMode::Graph6(p.clone());
        }
        let t: &mut Tolerances = &mut cfg.tol;
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut t.flux, self.tol_flux);
        set(&mut t.gate, self.tol_gate);
        set(&mut t.axis, self.tol_axis);
        set(&mut t.len, self.tol_len);
        set(&mut t.rational, self.tol_rat);
        set(&mut t.surd, self.tol_surd);
        set(&mut t.stencil_h, self.stencil_h);
        if let Some(q) = self.q_max {
            t.q_max = q;
        }
        if let Some(b) = self.coeff_bound {
            t.coeff_bound = b;
        }
        Ok(cfg)
    }
}

fn input(file: &Option<PathBuf>) -> io::Result<Box<dyn BufRead>> {
    Ok(match file {
        Some(p) => Box::new(BufReader::new(File::open(p)?)),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

fn print_text(report: &ScanReport, out: &mut impl Write) -> io::Result<()> {
    let t = &report.totals;
    writeln!(out, "configurations scanned   {}", t.scanned)?;
    writeln!(out, "gate hits (per role)     {}", t.hits)?;
    writeln!(out, "gate hits (per config)   {}", t.hit_configs)?;
    writeln!(out, "distinct (k, l, U)       {}", t.distinct)?;
    writeln!(out, "non-identity             {}", t.non_identity)?;
    writeln!(out, "without identity partner {}", t.unusable)?;
    writeln!(out, "usable                   {}", t.usable)?;
    writeln!(out, "distinct operations      {}", t.distinct_ops)?;
    writeln!(out, "  across momenta         {}", t.distinct_ops_any_momentum)?;
    if let Some(l) = t.max_length {
        writeln!(out, "longest length           {l} ({})", t.max_length_form.as_deref().unwrap_or("no closed form"))?;
    }
    writeln!(out, "usable with l >= 10      {}", t.usable_length_ge_10)?;
    writeln!(out, "usable with l >= 100     {}", t.usable_length_ge_100)?;
    writeln!(out, "negative lengths         {}", t.negative_lengths)?;
    writeln!(out)?;
    writeln!(out, "k        hits(role)  hits(cfg)  distinct  usable  ops  rotations  axes")?;
    for m in &report.per_momentum {
        writeln!(
            out,
            "{:<8} {:>10} {:>10} {:>9} {:>7} {:>4} {:>10} {:>5}",
            format!("{}pi/{}", m.momentum.p(), m.momentum.q()),
            m.hits,
            m.hit_configs,
            m.distinct,
            m.usable,
            m.distinct_ops,
            m.rotations,
            m.axes
        )?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, DriverError> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Scan(args) => {
            let cfg = args.config()?;
            let outcome = scan(&cfg)?;
            if let Some(report) = &outcome.report {
                print_text(report, &mut out)?;
            } else {
                writeln!(out, "stopped after {} of {} graphs; resume with --resume", outcome.processed, outcome.total)?;
            }
        }
        Command::Verify { catalog, extended } => {
            let report = verify(&catalog, extended, &Tolerances::default())?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                writeln!(out, "FAIL entry {}: {}", c.id, c.reason.as_deref().unwrap_or("unknown"))?;
            }
            writeln!(
                out,
                "{} entries, {} failed; max operator error {:e}, max length error {:e}, max blocked amplitude {:e}",
                report.checks.len(),
                report.failed,
                report.max_op_error,
                report.max_length_error,
                report.max_zero_residual
            )?;
            out.flush()?;
            if !report.passed() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::G6 { op } => match op {
            G6Op::Encode { file } => {
                for line in input(&file)?.lines() {
                    let line = line?;
                    if !line.trim().is_empty() {
                        writeln!(out, "{}", encode_line(&line)?)?;
                    }
                }
            }
            G6Op::Decode { file } => {
                for line in input(&file)?.lines() {
                    let line = line?;
                    if !line.trim().is_empty() {
                        writeln!(out, "{}", decode_line(&line)?)?;
                    }
                }
            }
            G6Op::Count { file } => {
                let c = count_graph6(input(&file)?)?;
                for (n, k) in &c.per_n {
                    writeln!(out, "{n} {k}")?;
                }
                writeln!(out, "total {}", c.total)?;
            }
            G6Op::Enumerate { n_max } => {
                write_levels(n_max, &mut out)?;
            }
        },
        Command::Report { catalog, format } => {
            let report = Catalog::load(&catalog)?.report();
            match format {
                Format::Text => print_text(&report, &mut out)?,
                Format::Csv => report.write_summary_csv(&mut out)?,
                Format::Jsonl => {
                    for row in &report.rows {
                        serde_json::to_writer(&mut out, row)?;
                        writeln!(out)?;
                    }
                    for m in &report.per_momentum {
                        serde_json::to_writer(&mut out, m)?;
                        writeln!(out)?;
                    }
                    serde_json::to_writer(&mut out, &report.totals)?;
                    writeln!(out)?;
                }
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gatescan: {e}");
            ExitCode::from(1)
        }
    }
}
