//! `scheme-forge` command line: argument parsing, dispatch and exit codes.
//!
//! Exit status: 0 on success/PASS, 1 when a checked property fails,
//! 2 on usage or input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use scheme_forge::classify::{classify_scheme, crosscheck_report, oracle_enumerate, ClassifyError};
use scheme_forge::digraph::{lexicographic_product, Digraph};
use scheme_forge::generators::{self, EnumerateOptions, GenError};
use scheme_forge::io::{self, InputError, InputErrorKind};
use scheme_forge::scheme::{verify_identities, Scheme};
use scheme_forge::wreath_product;

mod render;

pub const THREADS_ENV: &str = "SCHEME_FORGE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "scheme-forge",
    version,
    about = "Association schemes and weakly distance-regular digraphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the intersection-number identities of a scheme, or whether a
    /// digraph is weakly distance-regular.
    Verify {
        /// Scheme file, digraph file (with --digraph) or catalog expression.
        input: String,
        #[arg(long)]
        digraph: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Structural summary of a scheme, or distance data of a digraph.
    Analyze {
        input: String,
        #[arg(long)]
        digraph: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Diameter-2 classification with an oracle cross-check.
    Classify {
        input: String,
        #[command(flatten)]
        out: Output,
    },
    /// Brute-force search for diameter-2 arc sets (scheme's own labels).
    Oracle {
        input: String,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the classification with the brute-force oracle.
    Crosscheck {
        input: String,
        #[command(flatten)]
        out: Output,
    },
    /// Enumerate circulant schemes on Z_n.
    Enumerate {
        #[arg(long, default_value_t = 2)]
        min_n: usize,
        #[arg(long)]
        max_n: usize,
        /// Multiplier subgroup generators (only used above the exhaustive range).
        #[arg(long, value_delimiter = ',')]
        multipliers: Option<Vec<usize>>,
        #[arg(long, default_value_t = 10)]
        max_orbits: usize,
        /// Write one scheme file per instance into this directory.
        #[arg(long)]
        emit_dir: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Wreath product of schemes or lexicographic product of digraphs.
    Product {
        #[command(flatten)]
        kind: ProductKind,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Materialize a catalog scheme as JSON.
    Catalog {
        expr: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ProductKind {
    /// Inner and outer scheme.
    #[arg(long, num_args = 2, value_names = ["INNER", "OUTER"])]
    pub wreath: Option<Vec<String>>,
    /// Outer and inner digraph.
    #[arg(long, num_args = 2, value_names = ["OUTER", "INNER"])]
    pub lex: Option<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}: {error}")]
    Input {
        source_name: String,
        error: Box<InputError>,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, pass: bool) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: if pass { 0 } else { 1 },
        }
    }

    fn error(err: &CliError) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            code: err.exit_code(),
        }
    }
}

/// Resolves an input argument: an existing file, else a catalog expression.
pub fn load_scheme(arg: &str) -> Result<Scheme, CliError> {
    let input_err = |error| CliError::Input {
        source_name: arg.to_string(),
        error: Box::new(error),
    };
    let path = Path::new(arg);
    if path.exists() {
        return io::read_scheme_file(path).map_err(input_err);
    }
    if arg.contains('(') {
        return generators::catalog(arg).map_err(|e| input_err(InputError::new("", e)));
    }
    Err(input_err(InputError::new(
        "",
        InputErrorKind::Io("no such file and not a catalog expression".into()),
    )))
}

pub fn load_digraph(arg: &str) -> Result<Digraph, CliError> {
    io::read_digraph_file(Path::new(arg)).map_err(|error| CliError::Input {
        source_name: arg.to_string(),
        error: Box::new(error),
    })
}

fn write_or_return(text: String, output: &Option<PathBuf>) -> Result<String, CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Write {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn classify_error(arg: &str, e: ClassifyError) -> CliError {
    CliError::Usage(format!("{arg}: {e}"))
}

/// Runs one parsed command.
pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Verify {
            input,
            digraph: false,
            out,
        } => {
            let s = load_scheme(input)?;
            let result = verify_identities(&s);
            let pass = result.is_ok();
            Ok(Outcome::ok(render::verify(&s, &result, out.format), pass))
        }
        Command::Verify {
            input,
            digraph: true,
            out,
        } => {
            let g = load_digraph(input)?;
            let report = render::DigraphReport::new(&g);
            let pass = report.is_wdrd();
            Ok(Outcome::ok(report.render(out.format), pass))
        }
        Command::Analyze {
            input,
            digraph: false,
            out,
        } => {
            let s = load_scheme(input)?;
            Ok(Outcome::ok(render::analyze_scheme(&s, out.format), true))
        }
        Command::Analyze {
            input,
            digraph: true,
            out,
        } => {
            let g = load_digraph(input)?;
            Ok(Outcome::ok(
                render::DigraphReport::new(&g).render(out.format),
                true,
            ))
        }
        Command::Classify { input, out } => {
            let s = load_scheme(input)?;
            let report = classify_scheme(&s);
            let cross = crosscheck_report(&report).map_err(|e| classify_error(input, e))?;
            let pass = cross.pass;
            Ok(Outcome::ok(
                render::classify(&report, &cross, out.format),
                pass,
            ))
        }
        Command::Oracle { input, out } => {
            let s = load_scheme(input)?;
            let found = oracle_enumerate(&s).map_err(|e| classify_error(input, e))?;
            Ok(Outcome::ok(render::oracle(&s, &found, out.format), true))
        }
        Command::Crosscheck { input, out } => {
            let s = load_scheme(input)?;
            let report = classify_scheme(&s);
            let cross = crosscheck_report(&report).map_err(|e| classify_error(input, e))?;
            let pass = cross.pass;
            Ok(Outcome::ok(
                render::crosscheck(s.name(), &cross, out.format),
                pass,
            ))
        }
        Command::Enumerate {
            min_n,
            max_n,
            multipliers,
            max_orbits,
            emit_dir,
            out,
        } => {
            if min_n > max_n {
                return Err(CliError::Usage(format!(
                    "--min-n {min_n} exceeds --max-n {max_n}"
                )));
            }
            let opts = EnumerateOptions {
                multipliers: multipliers.clone(),
                max_orbits: *max_orbits,
            };
            if let Some(dir) = emit_dir {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Write {
                    path: dir.display().to_string(),
                    message: e.to_string(),
                })?;
            }
            let mut schemes = Vec::new();
            for n in *min_n..=*max_n {
                let found = generators::enumerate_circulant(n, &opts)
                    .map_err(|e: GenError| CliError::Usage(e.to_string()))?;
                for s in found {
                    if let Some(dir) = emit_dir {
                        let path = dir.join(format!("{}.json", s.name()));
                        let text = io::to_json_string(&io::scheme_to_value(&s));
                        write_or_return(text, &Some(path))?;
                    }
                    schemes.push(s);
                }
            }
            Ok(Outcome::ok(render::enumerate(&schemes, out.format), true))
        }
        Command::Product { kind, output } => {
            let text = match (&kind.wreath, &kind.lex) {
                (Some(w), _) => {
                    let (a, b) = (load_scheme(&w[0])?, load_scheme(&w[1])?);
                    io::to_json_string(&io::scheme_to_value(&wreath_product(&a, &b)))
                }
                (None, Some(l)) => {
                    let (g, h) = (load_digraph(&l[0])?, load_digraph(&l[1])?);
                    io::to_json_string(&io::digraph_to_value(&lexicographic_product(&g, &h)))
                }
                (None, None) => unreachable!("clap requires one product kind"),
            };
            Ok(Outcome::ok(write_or_return(text, output)?, true))
        }
        Command::Catalog { expr, output } => {
            let s = generators::catalog(expr).map_err(|e| CliError::Input {
                source_name: expr.clone(),
                error: Box::new(InputError::new("", e)),
            })?;
            let text = io::to_json_string(&io::scheme_to_value(&s));
            Ok(Outcome::ok(write_or_return(text, output)?, true))
        }
    }
}

/// Caps the global rayon pool from `SCHEME_FORGE_THREADS`, once per process.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{value}`"
            ))
        })?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                }
            } else {
                Outcome::ok(text, true)
            };
        }
    };
    if let Err(e) = configure_threads() {
        return Outcome::error(&e);
    }
    execute(&cli.command).unwrap_or_else(|e| Outcome::error(&e))
}
