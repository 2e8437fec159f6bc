use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use otcurves_core::config::{Config, Trials};
use otcurves_core::report::Report;
use otcurves_core::suites::{cmd_admissible, cmd_fixed_point, cmd_signature, cmd_units, cmd_verify};
use otcurves_core::OtError;

/// Number-field data and numerical certificates for Oeljeklaus-Toma manifolds.
#[derive(Parser, Debug)]
#[command(name = "otcurves", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Signature (s, t) and the roots of the defining polynomial.
    Signature(Common),
    /// Unit search and generator selection.
    Units(Common),
    /// Admissibility certificate for the selected generators.
    Admissible(Common),
    /// Leaf-disjointness certificate for one group word, e.g. "u a".
    FixedPoint {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
    },
    /// Run every verification suite, or replay one suite or trial.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Run only this suite.
        #[arg(long)]
        suite: Option<String>,
        /// Run only this trial of `--suite`.
        #[arg(long, requires = "suite")]
        trial: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Polynomial coefficients, ascending degree, e.g. "-1,-1,0,1".
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Coefficient bound for the unit search.
    #[arg(long)]
    bound: Option<u32>,
    #[arg(long)]
    precision_bits: Option<u32>,
    #[arg(long)]
    assume_irreducible: bool,
    /// Trial count for every sampled suite.
    #[arg(long)]
    trials: Option<usize>,
}

impl Common {
    fn config(&self) -> anyhow::Result<Config> {
        let mut cfg = match (&self.config, &self.poly) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| OtError::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<Config>(&text).map_err(|e| OtError::Config(e.to_string()))?
            }
            (None, Some(_)) => Config::new(Vec::new()),
            (None, None) => return Err(OtError::Config("either --config or --poly is required".into()).into()),
        };
        if let Some(poly) = &self.poly {
            cfg.polynomial = parse_poly(poly)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(bound) = self.bound {
            cfg.unit_bound = bound;
        }
        if let Some(bits) = self.precision_bits {
            cfg.precision_bits = bits;
        }
        if self.assume_irreducible {
            cfg.assume_irreducible = true;
        }
        if let Some(n) = self.trials {
            let lengths = (cfg.trials.leaf_word_length, cfg.trials.random_word_length);
            cfg.trials = Trials { leaf_word_length: lengths.0, random_word_length: lengths.1, ..Trials::uniform(n) };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_poly(text: &str) -> Result<Vec<i64>, OtError> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|e| OtError::Config(format!("bad coefficient '{t}': {e}"))))
        .collect()
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    let (common, report) = match &cli.command {
        Command::Signature(c) => (c, cmd_signature(&c.config()?)?),
        Command::Units(c) => (c, cmd_units(&c.config()?)?),
        Command::Admissible(c) => (c, cmd_admissible(&c.config()?)?),
        Command::FixedPoint { common, word } => (common, cmd_fixed_point(&common.config()?, word)?),
        Command::Verify { common, suite, trial } => (common, cmd_verify(&common.config()?, suite.as_deref(), *trial)?),
    };
    if let Some(path) = &common.out {
        let json = report.to_json()?;
        std::fs::write(path, json + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            print!("{}", report.summary());
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<OtError>().map_or(2, OtError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_lists() {
        assert_eq!(parse_poly("-1,-1,0,1").unwrap(), vec![-1, -1, 0, 1]);
        assert_eq!(parse_poly(" -1 -1 0 1 ").unwrap(), vec![-1, -1, 0, 1]);
        assert!(parse_poly("1,x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
