use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use koszul_cli::{run, Command, Format, RunConfig, Window};

/// Exact BGG, Tate resolution and sheaf cohomology computations on projective space.
#[derive(Parser, Debug)]
#[command(name = "koszul", version)]
struct Cli {
    /// computation to run
    #[arg(value_enum)]
    command: Command,
    /// JSON input document
    input: PathBuf,
    /// module name in the document
    #[arg(long)]
    module: Option<String>,
    /// complex name in the document (minimalize)
    #[arg(long)]
    complex: Option<String>,
    /// inclusive window lo..hi of degrees or positions
    #[arg(long, allow_hyphen_values = true)]
    window: Option<Window>,
    /// cohomological index i (em-fixture)
    #[arg(long)]
    index: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// write the output to this path instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// characteristic of the ground field, overriding the document
    #[arg(long)]
    prime: Option<u32>,
    /// report timing on standard error
    #[arg(short, long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = RunConfig {
        command: cli.command,
        input: cli.input,
        module: cli.module,
        complex: cli.complex,
        window: cli.window,
        index: cli.index,
        format: cli.format,
        out: cli.out,
        prime: cli.prime,
        verbose: cli.verbose,
    };
    ExitCode::from(run(&cfg) as u8)
}
