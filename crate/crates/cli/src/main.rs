use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use igusa_core::cell::{zeta_cells, zeta_cells_abscissa, CellsJson};
use igusa_core::distributions::{laurent_table, zeta_family_build, TestFunction};
use igusa_core::koszul::vanishing_dichotomy_scan;
use igusa_core::lattice::{convergence_abscissa, zeta_lattice, ExponentVector, LatticeFunction, LatticeJson};
use igusa_core::oracle::{
    cached_histogram, series_check_from_histogram, to_json_bytes, HistMode, ValHistogram, CACHE_ENV, DEFAULT_BUDGET,
};
use igusa_core::orbits::{classify_distribution_space, CharacterPair, KCharacter};
use igusa_core::scalar::{int, parse_rational, q_pow};
use igusa_core::selftest::{run_all, SelftestConfig};
use igusa_core::{Ctx, Error, FactoredRatFun, UnitScalar};
use serde::Serialize;

const EXIT_ERROR: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "igusa", version, about = "Exact p-adic zeta integrals, Laurent tables and brute-force oracles")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Histogram cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

/// The coefficient field: residue cardinality `q` and cyclotomic level `m`.
#[derive(Args, Debug)]
struct FieldArgs {
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long, default_value_t = 1)]
    m: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Σ_{x∈ℕⁿ} φ(x)·t^{d·x} for a lattice function in JSON.
    LatticeZeta {
        /// JSON file; stdin when omitted or `-`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Exponent vector, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u32>,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// ∫ |f|^s dμ over a union of cells described in JSON.
    CellZeta {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Laurent table of the determinant zeta integral.
    Laurent {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        r: i64,
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Center a0 of the expansion in 1 - a0·t; must be a power of q.
        #[arg(long, default_value = "1")]
        center: String,
        /// Largest index in the table.
        #[arg(long, default_value_t = 3)]
        window: i64,
        /// Test function, e.g. `D0` or `1/2*D1 + D0`.
        #[arg(long, default_value = "D0")]
        phi: String,
    },
    /// Rank orbits on M_{m,n} and invariant distributions.
    #[command(subcommand)]
    Orbits(OrbitsCmd),
    /// Brute-force enumeration over Z/p^k.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Ext over the group ring of Z^n.
    #[command(subcommand)]
    Ext(ExtCmd),
    /// Run the acceptance checks.
    Selftest {
        #[arg(long, default_value_t = SelftestConfig::default().seed)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum OrbitsCmd {
    /// Classify invariant distributions on M_{m,n} for a character pair.
    Classify {
        #[arg(long = "m")]
        rows: u32,
        #[arg(long)]
        n: u32,
        /// `triv:e` or `fin<m>^j:e`.
        #[arg(long)]
        chi1: KCharacter,
        #[arg(long)]
        chi2: KCharacter,
    },
}

#[derive(Args, Debug)]
struct HistArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Draws in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl HistArgs {
    fn mode(&self) -> HistMode {
        match self.mode {
            ModeArg::Exhaustive => HistMode::Exhaustive,
            ModeArg::Sampled => HistMode::Sampled { seed: self.seed, trials: self.trials },
        }
    }

    fn histogram(&self, cache_dir: Option<&Path>) -> Result<ValHistogram, Error> {
        cached_histogram(cache_dir, self.n, self.p, self.k, self.mode(), self.budget)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Histogram of val_p(det) over n×n matrices mod p^k.
    DetHist(HistArgs),
    /// Compare the histogram with the series of the determinant zeta integral.
    CheckDetZeta(HistArgs),
}

#[derive(Subcommand, Debug)]
enum ExtCmd {
    /// Random modules: Ext vanishes unless the characters agree.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A command either prints its output or fails with a library error; a
/// completed check that did not pass is reported as `mismatch`.
enum Failure {
    Lib(Error),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Error> {
    match path {
        Some(p) if p != Path::new("-") => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

/// `a0 = q^a`; the family lives over `Q`, so no root of unity is available.
fn parse_center(q: u64, s: &str) -> Result<UnitScalar, Error> {
    let r = parse_rational(s)?;
    if r == int(0) {
        return Err(Error::Domain("center 0 has no expansion in 1 - a0·t".into()));
    }
    (-64..=64)
        .find(|&a| q_pow(q, a) == r)
        .map(|a| UnitScalar { root_index: 0, q_exponent: a })
        .ok_or_else(|| Error::Domain(format!("center {s} is not a power of q = {q}")))
}

#[derive(Serialize)]
struct ZetaOutput {
    text: String,
    zeta: FactoredRatFun,
    abscissa: String,
}

fn print_zeta(format: Format, zeta: FactoredRatFun, abscissa: String) {
    match format {
        Format::Text => {
            println!("Z(t) = {zeta}");
            println!("abscissa: {abscissa}");
        }
        Format::Json => println!("{}", json(&ZetaOutput { text: zeta.to_text(), zeta, abscissa })),
    }
}

fn print_histogram(format: Format, h: &ValHistogram) {
    match format {
        Format::Text => {
            println!("n={} p={} k={} mode={}", h.n, h.p, h.k, h.mode.tag());
            for (j, c) in h.counts.iter().enumerate() {
                println!("  v={j:<3} {c}");
            }
            println!("  v>={:<2} {}", h.k, h.n_geq_k);
            println!("  total  {}", h.total);
        }
        Format::Json => print!("{}", String::from_utf8(to_json_bytes(h)).expect("utf-8")),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let format = cli.format;
    let cache_dir = cli.cache_dir.as_deref();
    match cli.cmd {
        Command::LatticeZeta { input, d, field } => {
            let ctx = Ctx::new(field.q, field.m)?;
            let wire: LatticeJson = serde_json::from_str(&read_input(input.as_deref())?).map_err(Error::from)?;
            let phi = LatticeFunction::from_json(&wire, &ctx)?;
            let d = ExponentVector(d);
            let zeta = zeta_lattice(&ctx, &phi, &d)?;
            print_zeta(format, zeta, convergence_abscissa(&phi, &d)?.to_string());
        }
        Command::CellZeta { input, field } => {
            let ctx = Ctx::new(field.q, field.m)?;
            let wire: CellsJson = serde_json::from_str(&read_input(input.as_deref())?).map_err(Error::from)?;
            let pieces = wire.to_pieces(&ctx)?;
            let zeta = zeta_cells(&ctx, &pieces, wire.bounded)?;
            print_zeta(format, zeta, zeta_cells_abscissa(&ctx, &pieces)?.to_string());
        }
        Command::Laurent { n, r, q, center, window, phi } => {
            let family = zeta_family_build(n, r, q)?;
            let a0 = parse_center(q, &center)?;
            let phi = TestFunction::parse(&family.ctx, &phi)?;
            let table = laurent_table(&family, &phi, a0, window)?;
            match format {
                Format::Text => {
                    println!("Z(phi) around t = 1/({}), phi = {phi}, w = 1 - a0*t", center);
                    for i in table.min_index()..=table.max_index() {
                        println!("  w^{i:<4} {}", table.coeff(i).expect("inside window").to_canonical());
                    }
                }
                Format::Json => println!("{}", json(&table.to_json())),
            }
        }
        Command::Orbits(OrbitsCmd::Classify { rows, n, chi1, chi2 }) => {
            let rep = classify_distribution_space(rows, n, &CharacterPair::new(chi1, chi2))?;
            println!("{}", json(&rep));
            if format == Format::Text {
                println!();
                println!("{:>3} {:>6}  admissible", "r", "codim");
                for o in &rep.orbits {
                    println!("{:>3} {:>6}  {}", o.r, o.codim, rep.admissible_orbits.contains(&o.r));
                }
                println!("invariant dimension: {}", rep.invariant_dim);
            }
        }
        Command::Oracle(OracleCmd::DetHist(args)) => print_histogram(format, &args.histogram(cache_dir)?),
        Command::Oracle(OracleCmd::CheckDetZeta(args)) => {
            let rep = series_check_from_histogram(&args.histogram(cache_dir)?)?;
            match format {
                Format::Text => {
                    for e in &rep.entries {
                        let tag = if e.pass { "ok" } else { "MISMATCH" };
                        println!("t^{:<3} enumerated {:<14} symbolic {:<14} {tag}", e.j, e.enumerated, e.symbolic);
                    }
                    println!("{}", if rep.pass { "pass" } else { "fail" });
                }
                Format::Json => println!("{}", json(&rep)),
            }
            if !rep.pass {
                return Err(Failure::Mismatch("enumeration disagrees with the symbolic series".into()));
            }
        }
        Command::Ext(ExtCmd::Scan { n, trials, seed }) => {
            let rep = vanishing_dichotomy_scan(n, trials, seed)?;
            match format {
                Format::Text => {
                    println!(
                        "n={n} trials={trials} seed={seed}: {} with equal characters, {} distinct",
                        rep.equal_characters, rep.distinct_characters
                    );
                    for c in &rep.counterexamples {
                        println!(
                            "  counterexample trial {}: dims {}",
                            c.trial,
                            json(&c.dims).replace(char::is_whitespace, "")
                        );
                    }
                    println!("{}", if rep.passed() { "pass" } else { "fail" });
                }
                Format::Json => println!("{}", json(&rep)),
            }
            if !rep.passed() {
                return Err(Failure::Mismatch(format!("{} counterexamples", rep.counterexamples.len())));
            }
        }
        Command::Selftest { seed } => {
            let cfg = SelftestConfig { seed, cache_dir: cli.cache_dir.clone(), ..SelftestConfig::default() };
            let results = run_all(&cfg);
            match format {
                Format::Text => results.iter().for_each(|r| println!("{}", r.line())),
                Format::Json => println!("{}", json(&results)),
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(Failure::Mismatch(format!("{failed} of {} criteria failed", results.len())));
            }
        }
    }
    Ok(())
}

fn error_exit(kind: &str, message: &str) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
    ExitCode::from(EXIT_ERROR)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => error_exit(e.kind(), &e.to_string()),
        Err(Failure::Mismatch(msg)) => error_exit("mismatch", &msg),
    }
}
