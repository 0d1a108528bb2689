//! Command-line front end.

pub mod commands;
pub mod parse;
pub mod render;
pub mod towerfile;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{execute, CliError, Command, Format, Report, Request};

#[derive(Debug, Parser)]
#[command(
    name = "towerdecomp",
    version,
    about = "Additive decomposition and integrability in primitive towers over Q(x)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CliCommand {
    /// Decompose f as g' + r with r a remainder
    Decomp(CommonArgs),
    /// Integrate f in the tower, if possible
    Integrate(CommonArgs),
    /// Decide whether f has an elementary integral
    Elementary(CommonArgs),
    /// Embed a logarithmic tower into a well-generated one
    Embed(CommonArgs),
    /// Print the associated matrix
    Matrix(CommonArgs),
    /// Validate the tower
    Check(CommonArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Tower file
    #[arg(long)]
    pub tower: PathBuf,
    /// Expression in the tower (repeatable for embed)
    #[arg(long = "expr")]
    pub exprs: Vec<String>,
    /// Emit JSON
    #[arg(long, conflicts_with = "latex")]
    pub json: bool,
    /// Emit LaTeX
    #[arg(long)]
    pub latex: bool,
    /// Rewrite generators so that their derivatives are simple
    #[arg(long)]
    pub normalize: bool,
    /// Also print associated matrices (embed)
    #[arg(long)]
    pub matrix: bool,
}

impl CliCommand {
    fn split(&self) -> (Command, &CommonArgs) {
        match self {
            CliCommand::Decomp(a) => (Command::Decomp, a),
            CliCommand::Integrate(a) => (Command::Integrate, a),
            CliCommand::Elementary(a) => (Command::Elementary, a),
            CliCommand::Embed(a) => (Command::Embed, a),
            CliCommand::Matrix(a) => (Command::Matrix, a),
            CliCommand::Check(a) => (Command::Check, a),
        }
    }
}

/// Run a parsed command line; returns the report or the error to print.
pub fn run(cli: &Cli) -> (Format, Result<Report, CliError>) {
    let (command, args) = cli.command.split();
    let format = if args.json {
        Format::Json
    } else if args.latex {
        Format::Latex
    } else {
        Format::Text
    };
    let result = std::fs::read_to_string(&args.tower)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.tower.display())))
        .and_then(|tower_src| {
            execute(&Request {
                command,
                tower_src,
                exprs: args.exprs.clone(),
                format,
                normalize: args.normalize,
                matrix: args.matrix,
            })
        });
    (format, result)
}
