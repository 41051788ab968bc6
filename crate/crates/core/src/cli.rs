//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::load_path;
use crate::diag::Diagnostic;
use crate::pipeline::{compile_spec, load_data, CompileError, Options};
use crate::placement::{DEFAULT_BUDGET, DEFAULT_CELL_SIZE};
use crate::spec::parse_spec_str;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "annogram", version, about = "Compile annotated chart specs to SVG")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a spec to SVG.
    Render(RenderArgs),
    /// Check a spec without writing output.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Data file overriding the spec's data source.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CELL_SIZE as u32)]
    pub grid_size: u32,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub placement_budget: usize,
    /// Also write the scene graph as `<out stem>.scene.json`.
    #[arg(long)]
    pub dump_scene: bool,
    /// Treat warnings as errors.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub strict: bool,
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub data_path: Option<PathBuf>,
    /// `None` validates only.
    pub out_path: Option<PathBuf>,
    pub grid_size: u32,
    pub placement_budget: usize,
    pub dump_scene: bool,
    pub strict: bool,
}

impl From<Command> for RunConfig {
    fn from(c: Command) -> Self {
        match c {
            Command::Render(a) => RunConfig {
                spec_path: a.spec,
                data_path: a.data,
                out_path: Some(a.out),
                grid_size: a.grid_size,
                placement_budget: a.placement_budget,
                dump_scene: a.dump_scene,
                strict: a.strict,
            },
            Command::Validate(a) => RunConfig {
                spec_path: a.spec,
                data_path: a.data,
                out_path: None,
                grid_size: DEFAULT_CELL_SIZE as u32,
                placement_budget: DEFAULT_BUDGET,
                dump_scene: false,
                strict: a.strict,
            },
        }
    }
}

fn emit(err: &mut dyn Write, diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(err, "{}", d.to_json_line());
    }
}

fn io_error(err: &mut dyn Write, path: &Path, e: &std::io::Error) -> i32 {
    emit(err, &[Diagnostic::error("IoError", "", format!("{}: {e}", path.display()))]);
    EXIT_IO
}

fn fail(err: &mut dyn Write, e: &CompileError) -> i32 {
    emit(err, &e.diagnostics());
    if e.is_io() {
        EXIT_IO
    } else {
        EXIT_INVALID
    }
}

/// Runs one invocation, writing diagnostics to `err`. Returns the exit
/// status.
pub fn run(cfg: &RunConfig, err: &mut dyn Write) -> i32 {
    if cfg.grid_size == 0 {
        emit(err, &[Diagnostic::error("UsageError", "", "--grid-size must be at least 1")]);
        return EXIT_INVALID;
    }
    let text = match std::fs::read_to_string(&cfg.spec_path) {
        Ok(t) => t,
        Err(e) => return io_error(err, &cfg.spec_path, &e),
    };
    let spec = match parse_spec_str(&text) {
        Ok(s) => s,
        Err(e) => return fail(err, &e.into()),
    };
    let base = cfg.spec_path.parent().unwrap_or(Path::new("."));
    let data = match &cfg.data_path {
        Some(p) => load_path(p).map_err(CompileError::Data),
        None => load_data(&spec, base),
    };
    let data = match data {
        Ok(d) => d,
        Err(e) => return fail(err, &e),
    };
    let opts = Options { cell_size: f64::from(cfg.grid_size), budget: cfg.placement_budget, strict: cfg.strict };
    let out = match compile_spec(&spec, data, &opts) {
        Ok(o) => o,
        Err(e) => return fail(err, &e),
    };
    emit(err, &out.diagnostics);
    let Some(out_path) = &cfg.out_path else { return EXIT_OK };
    if let Err(e) = std::fs::write(out_path, &out.svg) {
        return io_error(err, out_path, &e);
    }
    if cfg.dump_scene {
        let stem = out_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
        let path = out_path.with_file_name(format!("{stem}.scene.json"));
        if let Err(e) = std::fs::write(&path, out.scene.to_json()) {
            return io_error(err, &path, &e);
        }
    }
    EXIT_OK
}

/// Parses `args` (including the program name) and runs. Usage errors are
/// reported as a JSON-lines diagnostic with status 1.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.command.into(), err),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                let _ = write!(out, "{e}");
                EXIT_OK
            }
            _ => {
                let msg = e.to_string();
                let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
                emit(err, &[Diagnostic::error("UsageError", "", first)]);
                EXIT_INVALID
            }
        },
    }
}
