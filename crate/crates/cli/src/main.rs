//! `c3tr`: correlators, free energies, Hodge tables and the verification
//! suite for the framed mirror curve `x + y^f + y^(f+1) = 0`.
//!
//! Every JSON document written to stdout is UTF-8, newline-terminated and
//! deterministic for a given configuration; rationals are `"p/q"` strings.
//! Schemas live in `docs/schemas.md`.
//!
//! With `--cache-dir` (or `C3TR_CACHE_DIR`) set, correlators are stored one
//! file per `(f, g, h, σ_K, σ_Ψrec)` with a format version and a SHA-256
//! checksum; a file that fails either check is recomputed and overwritten.
//! The same directory holds `conventions.json`, written by the first run.
//!
//! Exit status: 0 when every check passes, 1 when some check fails, 2 on a
//! usage or fatal error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use c3tr::conventions::Sign;
use c3tr::session::{Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "c3tr",
    version,
    about = "Exact correlators and free energies of the framed curve x + y^f + y^(f+1) = 0"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Framings, comma separated.
    #[arg(
        long = "f",
        value_delimiter = ',',
        default_value = "1,2,3",
        global = true
    )]
    framings: Vec<i64>,
    /// Largest genus for `verify` and `free-energy`.
    #[arg(long, default_value_t = 3, global = true)]
    g_max: u32,
    /// Extra terms added to every truncation window.
    #[arg(long, default_value_t = 0, global = true)]
    window_margin: i64,
    /// Correlator and conventions cache.
    #[arg(long, env = "C3TR_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Force the kernel orientation sign (+1 or -1).
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true, global = true)]
    override_sign_kernel: Option<Sign>,
    /// Force the Ψ shift-recursion sign (+1 or -1).
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true, global = true)]
    override_sign_psirec: Option<Sign>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// W^(g,h) in the Ψ basis for each framing.
    Correlator {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        h: u32,
    },
    /// F^(g) by the direct and shortcut routes against the closed form, g = 2..=g_max.
    FreeEnergy,
    /// The full verification suite.
    Verify,
    /// Hodge brackets of W^(g,1) for each framing.
    Hodge {
        #[arg(long)]
        g: u32,
    },
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "1" | "+1" | "+" => Ok(Sign::Plus),
        "-1" | "-" => Ok(Sign::Minus),
        _ => Err(format!("expected +1 or -1, got {s:?}")),
    }
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            framings: self.framings.clone(),
            g_max: self.g_max,
            window_margin: self.window_margin,
            cache_dir: self.cache_dir.clone(),
            overrides: Overrides {
                sign_kernel: self.override_sign_kernel,
                sign_psirec: self.override_sign_psirec,
            },
            ..RunConfig::default()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = cli.common.config();
    let text = cli.common.format == Format::Text;
    let outcome = match cli.command {
        Command::Correlator { g, h } => commands::correlator(config, g, h, text),
        Command::FreeEnergy => commands::free_energy(config, text),
        Command::Verify => commands::verify(config, text),
        Command::Hodge { g } => commands::hodge(config, g, text),
    };
    match outcome {
        Ok(out) => {
            print!("{}", out.body);
            if out.cache_rejects > 0 {
                eprintln!(
                    "warning: {} cache file(s) failed validation and were recomputed",
                    out.cache_rejects
                );
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
