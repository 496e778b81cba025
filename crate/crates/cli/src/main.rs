use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qem_core::gallery;
use qem_core::harness::{werner_sweep, Mutation, SuiteConfig};
use qem_core::io::{CertificateFile, ChannelFile, StateFile};
use qem_core::{basis_list, eq_measure, run_suite, Density, Dims, Error, Picture, Tolerances};

/// Quasi entanglement measure toolkit.
#[derive(Parser)]
#[command(name = "qem", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the measure on a state file.
    Measure {
        path: PathBuf,
        #[arg(long, value_parser = parse_picture, default_value = "coherence")]
        picture: Picture,
        /// Skip Hermiticity, trace and positivity checks.
        #[arg(long)]
        no_validate: bool,
    },
    /// Tabulate f and eq over the Werner family.
    SweepWerner {
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 401)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the seeded property suite; exits 4 if any property fails.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Subsystem dimensions, e.g. `--dims 2,3`; repeatable.
        #[arg(long, value_parser = parse_dims)]
        dims: Vec<Dims>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Where to write counterexamples of failing properties.
        #[arg(long)]
        counterexample_out: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_mutation: Option<usize>,
    },
    /// Emit a reference or random state file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        output: Option<PathBuf>,
    },
    /// Dump the generalized Gell-Mann basis in flat order.
    Basis {
        #[arg(long)]
        dim: usize,
    },
    /// Apply a local channel or unitary file to a state file.
    Apply {
        path: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        /// Require one operator per subsystem and check unitarity.
        #[arg(long)]
        unitary: bool,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Ghz {
        #[arg(long)]
        n: usize,
    },
    Werner {
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
    },
    Mixed {
        #[arg(long, value_parser = parse_dims)]
        dims: Dims,
    },
    Pure {
        #[command(flatten)]
        random: RandomArgs,
    },
    Density {
        #[command(flatten)]
        random: RandomArgs,
        #[arg(long)]
        rank: usize,
    },
    Separable {
        #[command(flatten)]
        random: RandomArgs,
        #[arg(long)]
        terms: usize,
        /// Separability certificate path; defaults to `<output>.cert.json`.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, value_parser = parse_dims)]
    dims: Dims,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_picture(s: &str) -> Result<Picture, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let v = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad dimension '{p}': {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Dims::new(v).map_err(|e| e.to_string())
}

/// Exit-code classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Usage = 1,
    Validation = 2,
    Capability = 3,
    Property = 4,
}

#[derive(Debug)]
struct Failure {
    class: Class,
    error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self { class: Class::Usage, error: error.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let class = match e {
            Error::Picture { .. } | Error::NotAllQubits(_) | Error::NotBipartite(_) => Class::Capability,
            ref e if e.is_validation() => Class::Validation,
            _ => Class::Usage,
        };
        Self { class, error: e.into() }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::usage)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(Failure::usage)
}

/// Pretty JSON for reports.
fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// One-line JSON for matrix-heavy data files.
fn to_compact_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn emit(text: &str, output: Option<&Path>) -> Outcome {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(Failure::usage),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout").map_err(Failure::usage),
    }
}

fn load_state(path: &Path, validate: bool) -> Outcome<Density> {
    let file: StateFile = read_json(path)?;
    Ok(if validate { file.to_density(&Tolerances::default())? } else { file.to_density_unchecked()? })
}

fn measure(path: &Path, picture: Picture, no_validate: bool) -> Outcome {
    let rho = load_state(path, !no_validate)?;
    let report = eq_measure(&rho, Some(picture))?;
    emit(&to_json(&report), None)
}

fn sweep(from: f64, to: f64, steps: usize, out: Format, output: Option<&Path>) -> Outcome {
    let s = werner_sweep(from, to, steps)?;
    match out {
        Format::Json => emit(&to_json(&s), output),
        Format::Csv => {
            emit(&s.to_csv(), output)?;
            eprint!("{}", s.crossing_report());
            Ok(())
        }
    }
}

fn verify(cfg: SuiteConfig, output: Option<&Path>, counterexample_out: Option<&Path>) -> Outcome {
    let report = run_suite(&cfg)?;
    emit(&to_json(&report), output)?;
    for p in &report.properties {
        let status = if p.passed { "pass" } else { "FAIL" };
        eprintln!(
            "{status} {} (worst {:e}, tolerance {:e}, {} trials)",
            p.name, p.worst_violation, p.tolerance, p.trials
        );
    }
    if report.passed {
        return Ok(());
    }
    let examples: Vec<_> = report.failures().filter_map(|p| p.counterexample.clone()).collect();
    if let Some(path) = counterexample_out {
        fs::write(path, to_json(&examples))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::usage)?;
    }
    let names: Vec<_> = report.failures().map(|p| p.name.as_str()).collect();
    Err(Failure { class: Class::Property, error: anyhow!("failing properties: {}", names.join(", ")) })
}

fn gen(kind: GenKind, output: Option<&Path>) -> Outcome {
    let rho: Density = match kind {
        GenKind::Ghz { n } => gallery::ghz(n)?,
        GenKind::Werner { phi } => gallery::werner(phi)?,
        GenKind::Mixed { dims } => gallery::completely_mixed(&dims),
        GenKind::Pure { random } => gallery::random_pure(&random.dims, random.seed),
        GenKind::Density { random, rank } => gallery::random_density(&random.dims, rank, random.seed)?,
        GenKind::Separable { random, terms, certificate } => {
            let (rho, ensemble) = gallery::random_separable(&random.dims, terms, random.seed)?;
            let cert_path = certificate.or_else(|| output.map(|p| p.with_extension("cert.json")));
            let cert = to_compact_json(&CertificateFile::from_ensemble(&ensemble));
            match cert_path {
                Some(p) => {
                    fs::write(&p, cert).with_context(|| format!("writing {}", p.display())).map_err(Failure::usage)?
                }
                None => eprint!("{cert}"),
            }
            rho
        }
    };
    emit(&to_compact_json(&StateFile::from_density(&rho)), output)
}

fn basis(dim: usize) -> Outcome {
    if dim < 2 {
        return Err(Failure::usage(anyhow!("--dim must be at least 2, got {dim}")));
    }
    let list: Vec<_> = basis_list::<f64>(dim)?.iter().map(qem_core::io::matrix_to_rows).collect();
    emit(&to_compact_json(&list), None)
}

fn apply(path: &Path, channel: &Path, unitary: bool) -> Outcome {
    let rho = load_state(path, true)?;
    let file: ChannelFile = read_json(channel)?;
    let out = if unitary {
        qem_core::apply_local_unitary(&rho, &file.to_unitary()?)?
    } else {
        qem_core::apply_local_kraus(&rho, &file.to_channel()?)?
    };
    emit(&to_compact_json(&StateFile::from_density(&out)), None)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Measure { path, picture, no_validate } => measure(&path, picture, no_validate),
        Command::SweepWerner { from, to, steps, out, output } => sweep(from, to, steps, out, output.as_deref()),
        Command::Verify { seed, trials, dims, output, counterexample_out, inject_mutation } => {
            let mut cfg = SuiteConfig::new(seed, trials);
            if !dims.is_empty() {
                cfg.dims = dims;
            }
            cfg.mutation = inject_mutation.map(|index| Mutation::NegateGWeight { index });
            verify(cfg, output.as_deref(), counterexample_out.as_deref())
        }
        Command::Gen { kind, output } => gen(kind, output.as_deref()),
        Command::Basis { dim } => basis(dim),
        Command::Apply { path, channel, unitary } => apply(&path, &channel, unitary),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(Class::Usage as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.class as u8)
        }
    }
}
