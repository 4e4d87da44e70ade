//! Command-line front end.
//!
//! Exit status: 0 positive result, 1 well-formed negative result, 2 usage or
//! input error, 3 internal invariant failure.

use std::ffi::OsString;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::construction::{build_symmetric_witnesses, slice_subset};
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::freespace::molecule_norm;
use crate::io::{parse_molecule_entries, parse_space, SpaceDocument};
use crate::metric::{validate_metric, PointId, PointedMetricSpace};
use crate::rational::Rational;
use crate::report::{
    CheckDoc, ConstructionDoc, InequalityDoc, MoleculeNormDoc, MoleculeNormEntry, Report, ScanDoc, ValidationDoc,
    WitnessDoc,
};
use crate::trapezoid::{
    check_ineq_ltp, check_ineq_sym, counterexample_scan, find_witness, required_epsilon, Mode, WitnessQuery,
};

#[derive(Parser, Debug)]
#[command(
    name = "sltp",
    version,
    about = "Exact trapezoid-inequality checks and slice-witness constructions on finite metric spaces"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the metric axioms.
    Validate(SpaceArg),
    /// Emit a generated space.
    Example(ExampleArgs),
    /// The two-point inequality for one pair, or for every pair with --scan.
    CheckLtp(CheckArgs),
    /// Both inequalities for one pair, or for every pair with --scan.
    CheckSltp(CheckArgs),
    /// Check every pair and report a witness or the least required epsilon.
    Scan(SearchArgs),
    /// First pair (in point order) satisfying the inequalities.
    Witness(SearchArgs),
    /// Free-space norms of the molecules in a file.
    MoleculeNorm(MoleculeArgs),
    /// Build symmetric witnesses for the slices in a file.
    Construct(ConstructArgs),
}

#[derive(Args, Debug)]
pub struct SpaceArg {
    /// Space document; `-` reads standard input.
    #[arg(long, default_value = "-")]
    pub space: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Ex1,
    Ex2,
    L1Basis,
    RandomGraph,
    L1Cloud,
}

#[derive(Args, Debug)]
pub struct ExampleArgs {
    #[arg(value_enum)]
    pub family: FamilyName,
    /// Number of fresh pairs (ex1, ex2).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Dimension or cloud size (l1-basis, l1-cloud).
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Vertex count (random-graph).
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    /// Comma-separated point names forming N.
    #[arg(long)]
    pub subset: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value = "sltp")]
    pub mode: String,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    #[arg(long)]
    pub subset: String,
    #[arg(long)]
    pub eps: String,
    /// The pair `u,v` to check.
    #[arg(long, conflicts_with = "scan", required_unless_present = "scan")]
    pub pair: Option<String>,
    /// Check every pair instead of one.
    #[arg(long)]
    pub scan: bool,
}

#[derive(Args, Debug)]
pub struct MoleculeArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    /// JSON list of `{"terms": [{"point", "coeff"}]}` or `{"pair": [x, y]}` entries.
    #[arg(long)]
    pub molecules: String,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    /// JSON list of slice entries (molecule plus optional `alpha`).
    #[arg(long)]
    pub slices: String,
    #[arg(long)]
    pub eps: String,
    /// Width for entries without their own `alpha`.
    #[arg(long)]
    pub alpha: Option<String>,
}

/// What a finished invocation printed and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(&cli, stdin) {
        Ok(report) => Outcome {
            code: report.exit_code(),
            stdout: match cli.format {
                Format::Human => report.to_human(),
                Format::Machine => report.to_machine() + "\n",
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: if e.is_internal() { 3 } else { 2 },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn read_source(path: &str, stdin: &mut dyn Read) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        stdin.read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{path}: {e}"))))
    }
}

fn load_space(arg: &SpaceArg, stdin: &mut dyn Read) -> Result<PointedMetricSpace> {
    parse_space(&read_source(&arg.space, stdin)?)
}

fn parse_subset(space: &PointedMetricSpace, text: &str) -> Result<Vec<PointId>> {
    let names: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(Error::OutOfRange("--subset needs at least one point".into()));
    }
    space.ids(&names)
}

fn parse_pair(space: &PointedMetricSpace, text: &str) -> Result<(PointId, PointId)> {
    match text.split(',').map(str::trim).collect::<Vec<_>>()[..] {
        [u, v] => Ok((space.id(u)?, space.id(v)?)),
        _ => Err(Error::OutOfRange(format!("--pair expects `u,v`, got {text:?}"))),
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Report> {
    match &cli.command {
        Command::Validate(arg) => {
            let space = load_space(arg, stdin)?;
            Ok(Report::Validation(ValidationDoc::new(&space, &validate_metric(&space))))
        }
        Command::Example(args) => {
            let spec = match args.family {
                FamilyName::Ex1 => FamilySpec::Ex1 { k: args.k },
                FamilyName::Ex2 => FamilySpec::Ex2 { k: args.k },
                FamilyName::L1Basis => FamilySpec::L1Basis { m: args.m },
                FamilyName::RandomGraph => FamilySpec::RandomGraphMetric {
                    n: args.n,
                    seed: args.seed,
                },
                FamilyName::L1Cloud => FamilySpec::L1Cloud {
                    m: args.m,
                    seed: args.seed,
                },
            };
            Ok(Report::Space(SpaceDocument::from_space(&spec.generate()?)))
        }
        Command::CheckLtp(args) => check_command(args, Mode::Ltp, stdin),
        Command::CheckSltp(args) => check_command(args, Mode::Sltp, stdin),
        Command::Scan(args) => {
            let space = load_space(&args.space, stdin)?;
            let subset = parse_subset(&space, &args.subset)?;
            let eps: Rational = args.eps.parse()?;
            let mode: Mode = args.mode.parse()?;
            let scan = counterexample_scan(&space, &subset, &eps, mode)?;
            Ok(Report::Scan(ScanDoc::new(&space, &scan)))
        }
        Command::Witness(args) => {
            let space = load_space(&args.space, stdin)?;
            let subset = parse_subset(&space, &args.subset)?;
            let eps: Rational = args.eps.parse()?;
            let mode: Mode = args.mode.parse()?;
            let found = find_witness(&space, &WitnessQuery::new(subset.clone(), eps.clone()), mode)?;
            Ok(Report::Witness(WitnessDoc::new(
                &space,
                mode,
                &eps,
                &subset,
                found.as_ref(),
            )))
        }
        Command::MoleculeNorm(args) => {
            let space = load_space(&args.space, stdin)?;
            let entries = parse_molecule_entries(&read_source(&args.molecules, stdin)?)?;
            let molecules = entries
                .iter()
                .map(|e| {
                    let mu = e.to_molecule(&space)?;
                    let norm = molecule_norm(&space, &mu)?;
                    Ok(MoleculeNormEntry::new(&space, &mu, &norm))
                })
                .collect::<Result<_>>()?;
            Ok(Report::MoleculeNorm(MoleculeNormDoc { molecules }))
        }
        Command::Construct(args) => {
            let space = load_space(&args.space, stdin)?;
            let eps: Rational = args.eps.parse()?;
            let default_alpha = args.alpha.as_deref().map(str::parse::<Rational>).transpose()?;
            let slices = parse_molecule_entries(&read_source(&args.slices, stdin)?)?
                .iter()
                .map(|e| e.to_slice(&space, default_alpha.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            let outcome = build_symmetric_witnesses(&space, &slices, &eps)?;
            let subset = slice_subset(&space, &slices);
            Ok(Report::Construction(ConstructionDoc::new(
                &space, &eps, &subset, &outcome,
            )))
        }
    }
}

fn check_command(args: &CheckArgs, mode: Mode, stdin: &mut dyn Read) -> Result<Report> {
    let space = load_space(&args.space, stdin)?;
    let subset = parse_subset(&space, &args.subset)?;
    let eps: Rational = args.eps.parse()?;
    if args.scan {
        let scan = counterexample_scan(&space, &subset, &eps, mode)?;
        return Ok(Report::Scan(ScanDoc::new(&space, &scan)));
    }
    let (u, v) = parse_pair(&space, args.pair.as_deref().unwrap_or_default())?;
    let mut checks = vec![check_ineq_ltp(&space, &subset, &eps, u, v)?];
    if mode == Mode::Sltp {
        checks.push(check_ineq_sym(&space, &subset, &eps, u, v)?);
    }
    let required = required_epsilon(&space, &subset, u, v)?;
    Ok(Report::Check(CheckDoc {
        mode,
        epsilon: eps,
        subset: subset.iter().map(|&p| space.name(p).to_string()).collect(),
        u: space.name(u).to_string(),
        v: space.name(v).to_string(),
        holds: checks.iter().all(|c| c.holds),
        checks: checks.iter().map(|c| InequalityDoc::new(&space, c)).collect(),
        required_epsilon: (&required).into(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str], input: &str) -> Outcome {
        let argv = std::iter::once("sltp").chain(args.iter().copied());
        run(argv, &mut input.as_bytes())
    }

    #[test]
    fn example_piped_into_scan() {
        let space = run_str(&["example", "ex1", "--k", "5"], "");
        assert_eq!(space.code, 0);
        let out = run_str(
            &["check-sltp", "--subset", "a1,a2,b1,b2", "--eps", "0", "--scan"],
            &space.stdout,
        );
        assert_eq!(out.code, 1, "{}", out.stderr);
        assert!(out.stdout.contains("all-pairs-fail, min required ε = 1/3"));
    }

    #[test]
    fn single_pair_check() {
        let space = run_str(&["example", "ex2", "--k", "1"], "").stdout;
        let out = run_str(
            &[
                "--format",
                "machine",
                "check-ltp",
                "--subset",
                "a,b",
                "--eps",
                "0",
                "--pair",
                "u1,v1",
            ],
            &space,
        );
        assert_eq!(out.code, 1);
        let report: Report = serde_json::from_str(&out.stdout).unwrap();
        let Report::Check(doc) = report else {
            panic!("wrong report kind")
        };
        assert_eq!(doc.checks[0].slack, Rational::from_integer(-1));
        assert_eq!(doc.required_epsilon.ltp, crate::rational::q(1, 3));
    }

    #[test]
    fn triangle_violation_exits_one() {
        let text = r#"{"points":["a","b","c"],"base":"a","matrix":[[0,1,3],[1,0,1],[3,1,0]]}"#;
        let out = run_str(&["validate"], text);
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains("Triangle"));
        assert!(out.stdout.contains("(a, c, b)"));
    }

    #[test]
    fn usage_and_input_errors_exit_two() {
        assert_eq!(run_str(&["check-ltp", "--subset", "a"], "").code, 2);
        assert_eq!(run_str(&["validate"], "{not json").code, 2);
        let space = run_str(&["example", "ex1"], "").stdout;
        assert_eq!(
            run_str(
                &["check-ltp", "--subset", "zz", "--eps", "0", "--pair", "u1,v1"],
                &space
            )
            .code,
            2
        );
        assert_eq!(
            run_str(
                &["check-ltp", "--subset", "a1", "--eps", "1", "--pair", "u1,v1"],
                &space
            )
            .code,
            2
        );
        assert_eq!(
            run_str(&["scan", "--subset", "a1", "--eps", "0", "--mode", "nope"], &space).code,
            2
        );
    }
}
