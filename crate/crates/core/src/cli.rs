//! Command-line front end. Each subcommand reads one rule file and prints a
//! JSON document (or a short text summary) for one stage of the pipeline.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Category, Error, Result};
use crate::report::{
    collar_section, complex_summary, full_report, gap_label_section, homology_section, measure_section,
    oracle_section, rule_section, walk_section, ComplexSection, Options, Pipeline, WalkSpec,
};
use crate::ruleset::{parse_rule, SubstitutionRule, DEFAULT_BUDGET};

#[derive(Parser, Debug)]
#[command(name = "hulltool", version, about = "Cohomology, invariant measures and gap labels of substitution tilings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Flags {
    /// Truncation depth for measures and gap labels.
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    /// Oracle inflation depth (default 20 in dimension 1, 8 above).
    #[arg(long, global = true)]
    pub inflate: Option<usize>,
    /// Fractional digits in decimal renderings.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    pub precision: u32,
    /// Cap on the number of cells any single expansion may produce.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Membership query for the gap-label module, a polynomial in lambda.
    #[arg(long, global = true)]
    pub contains: Vec<String>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a rule and summarise it.
    Validate { rule: PathBuf },
    /// Force the border and check the flattening condition.
    Collar { rule: PathBuf },
    /// Cell complexes with their boundary matrices.
    Complex { rule: PathBuf },
    /// Integer homology and cohomology.
    Homology { rule: PathBuf },
    /// Perron data, invariant measure and the ergodicity certificate.
    Measure { rule: PathBuf },
    /// Gap-label generators, Hermite bases and membership queries.
    GapLabels { rule: PathBuf },
    /// Empirical frequencies against the exact weights.
    Oracle { rule: PathBuf },
    /// Everything above in one document.
    Report { rule: PathBuf },
    /// Walk a hull point through a list of translations read from a JSON file.
    Translate { rule: PathBuf, walk: PathBuf },
}

impl Command {
    fn rule_path(&self) -> &PathBuf {
        match self {
            Command::Validate { rule }
            | Command::Collar { rule }
            | Command::Complex { rule }
            | Command::Homology { rule }
            | Command::Measure { rule }
            | Command::GapLabels { rule }
            | Command::Oracle { rule }
            | Command::Report { rule }
            | Command::Translate { rule, .. } => rule,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.category() {
        Category::Input => 2,
        Category::Precondition => 3,
        Category::Budget => 4,
    }
}

fn options(f: &Flags) -> Options {
    Options {
        depth: f.depth,
        inflate: f.inflate,
        precision: f.precision as usize,
        budget: f.budget,
        contains: f.contains.clone(),
    }
}

fn render<T: Serialize>(value: &T, format: Format, text: impl FnOnce(&T) -> String) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Text => text(value),
    })
}

fn pipeline(rule: &SubstitutionRule, budget: u64) -> Result<Pipeline> {
    Pipeline::run(rule, budget)
}

/// Runs one command and returns what it prints.
pub fn execute(cli: &Cli) -> Result<String> {
    let text = std::fs::read_to_string(cli.command.rule_path())?;
    let rule = parse_rule(&text)?;
    let opts = options(&cli.flags);
    let fmt = cli.flags.format;
    match &cli.command {
        Command::Validate { .. } => render(&rule_section(&rule), fmt, |r| {
            format!(
                "{}: dimension {}, tiles {}, primitive {} (exponent {:?})\n",
                r.name.as_deref().unwrap_or("<unnamed>"),
                r.dimension,
                r.labels.join(" "),
                r.primitive,
                r.primitivity_exponent
            )
        }),
        Command::Collar { .. } => {
            let tower = crate::collar::border_forcing(&rule, opts.budget)?;
            render(&collar_section(&tower)?, fmt, |c| {
                let mut s = String::new();
                for d in &c.diagnostics {
                    let _ = writeln!(s, "{d}");
                }
                let _ = writeln!(s, "collared tiles: {}", c.labels.join(" "));
                let _ = writeln!(s, "uncollared flat: {}, collared flat: {}", c.uncollared.flat, c.collared.flat);
                s
            })
        }
        Command::Complex { .. } => {
            let p = pipeline(&rule, opts.budget)?;
            let section = ComplexSection { uncollared: complex_summary(&p.uncollared), collared: complex_summary(p.efs.complex()) };
            render(&section, fmt, |c| {
                format!(
                    "uncollared cells {:?} (euler {}), collared cells {:?} (euler {}), boundary squares vanish: {}\n",
                    c.uncollared.cell_counts,
                    c.uncollared.euler_characteristic,
                    c.collared.cell_counts,
                    c.collared.euler_characteristic,
                    c.uncollared.boundary_squares_vanish && c.collared.boundary_squares_vanish
                )
            })
        }
        Command::Homology { .. } => {
            let p = pipeline(&rule, opts.budget)?;
            render(&homology_section(&p.uncollared, p.efs.complex()), fmt, |h| {
                let mut s = String::new();
                for (name, ds) in [("uncollared", &h.uncollared), ("collared", &h.collared)] {
                    for d in ds {
                        let _ = writeln!(s, "{name} H_{0} = {1}, H^{0} = {2}", d.degree, d.homology.display, d.cohomology.display);
                    }
                }
                s
            })
        }
        Command::Measure { .. } => {
            let p = pipeline(&rule, opts.budget)?;
            render(&measure_section(&rule, &p.efs, &p.outcome, &opts)?, fmt, |m| m.to_text())
        }
        Command::GapLabels { .. } => {
            let p = pipeline(&rule, opts.budget)?;
            let m = p.measure().ok_or_else(|| Error::NotPrimitive("collared substitution matrix".into()))?;
            render(&gap_label_section(&p.efs, m, &opts)?, fmt, |g| g.to_text())
        }
        Command::Oracle { .. } => {
            let p = pipeline(&rule, opts.budget)?;
            let m = p.measure().ok_or_else(|| Error::NotPrimitive("collared substitution matrix".into()))?;
            render(&oracle_section(&p.tower, &p.efs, m, &opts)?, fmt, |o| o.to_text())
        }
        Command::Report { .. } => render(&full_report(&rule, &opts)?, fmt, |r| r.to_text()),
        Command::Translate { walk, .. } => {
            let spec: WalkSpec = serde_json::from_str(&std::fs::read_to_string(walk)?)?;
            let efs = crate::efs::build_efs(&crate::collar::border_forcing(&rule, opts.budget)?)?;
            render(&walk_section(&efs, &spec, opts.precision)?, fmt, |w| w.to_text())
        }
    }
}

/// Parses arguments, runs, writes output and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = execute(&cli).and_then(|s| match &cli.flags.out {
        Some(path) => std::fs::write(path, s).map_err(Error::from),
        None => {
            print!("{s}");
            Ok(())
        }
    });
    match out {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
