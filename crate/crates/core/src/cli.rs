//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when `validate` finds a violation or output
//! cannot be written, 2 on usage errors (bad flags, malformed or
//! out-of-range numbers, unknown methods).

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::calibration::{
    calibrate_f_kappa, calibrate_h, calibrate_integrated, calibrate_power, e_to_p, jeffreys_category, vs_bound,
    CalibratorSpec,
};
use crate::cross_merging::{e_to_p_merge, p_to_e_merge, p_to_e_mixture, ville_se_to_p};
use crate::e_merging::{EMerger, MergeClass};
use crate::error::Error;
use crate::multiple_testing::{
    adjust_e_average, adjust_e_product_with, fact_fisher, fact_generic, holm_adjust, hommel_adjust, ProductAdjustment,
};
use crate::oracle::{check_e_merging_validity, ValidityConfig, ValidityOutcome};
use crate::p_merging::PMerger;
use crate::parallel::Execution;
use crate::simulation::{
    parse_methods, run_combining_experiment, run_multiple_experiment, CombiningConfig, CombiningMethod, MultipleConfig,
    MultipleMethod,
};
use crate::types::{EValue, EVector, PValue, PVector};

#[derive(Debug, Parser)]
#[command(
    name = "evalues",
    version,
    about = "E-value calibration, merging and multiple testing"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn p-values into e-values, one per line.
    Calibrate {
        #[arg(long, value_enum)]
        method: CalibrateMethod,
        #[arg(long)]
        kappa: Option<f64>,
        #[command(flatten)]
        input: Input,
    },
    /// Turn e-values into p-values with min(1, 1/e), one per line.
    E2p {
        #[command(flatten)]
        input: Input,
    },
    /// Merge e-values into one e-value.
    MergeE {
        #[arg(long, value_enum)]
        method: MergeEMethod,
        #[command(flatten)]
        params: MergeParams,
        #[command(flatten)]
        input: Input,
    },
    /// Merge p-values into one p-value.
    MergeP {
        #[arg(long, value_enum)]
        method: MergePMethod,
        /// Rank for `ruger`.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        input: Input,
    },
    /// Merge e-values into a p-value or p-values into an e-value.
    Cross {
        #[arg(long, value_enum)]
        method: CrossMethod,
        #[arg(long)]
        kappa: Option<f64>,
        /// Comma-separated weights for `mixture`.
        #[arg(long)]
        weights: Option<String>,
        /// Comma-separated calibrators for `mixture`, e.g. `power:0.5,integrated,h:1,f:2`.
        #[arg(long)]
        calibrators: Option<String>,
        #[command(flatten)]
        input: Input,
    },
    /// Adjust e-values or p-values for multiple testing.
    Adjust {
        #[arg(long, value_enum)]
        method: AdjustMethod,
        #[command(flatten)]
        input: Input,
    },
    /// Closed testing of p-values on top of a p-merging function.
    Fact {
        #[arg(long, value_enum)]
        method: FactMethod,
        #[command(flatten)]
        input: Input,
    },
    /// Search for a joint law under which a merging function is invalid.
    Validate {
        #[arg(long, value_enum)]
        method: MergeEMethod,
        #[command(flatten)]
        params: MergeParams,
        /// Dependence assumed for the inputs.
        #[arg(long, value_enum, default_value = "arbitrary")]
        class: ClassArg,
        /// Number of inputs.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiply the merged value by this factor before checking.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Run a seeded Gaussian experiment and write median trajectories as CSV.
    Simulate(SimulateArgs),
    /// Print the evidence category of each e-value.
    Jeffreys {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// Values separated by whitespace or commas; `-` reads standard input.
    #[arg(allow_hyphen_values = true)]
    values: Vec<String>,
    /// Read values from a file instead.
    #[arg(long, conflicts_with = "values")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MergeParams {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Rank for `ruger`, order for `u-stat`.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated weights of the U-statistics of order 0..=K for `u-mixture`.
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    /// Comma-separated method names, or `all`.
    #[arg(long, default_value = "all")]
    method: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    n_obs: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long)]
    fraction_alt: Option<f64>,
    #[arg(long)]
    n_hyp: Option<usize>,
    #[arg(long)]
    n_false: Option<usize>,
    /// Run seeds one after another instead of on a thread pool.
    #[arg(long)]
    sequential: bool,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CalibrateMethod {
    Power,
    Integrated,
    H,
    F,
    /// The VS bound; not a valid e-value.
    Vs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MergeEMethod {
    Average,
    Mixture,
    UStat,
    UMixture,
    Product,
    Ruger,
    Simes,
    MFamily,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MergePMethod {
    Bonferroni,
    Ruger,
    Simes,
    Fisher,
    Max,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CrossMethod {
    E2p,
    P2e,
    Mixture,
    Ville,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AdjustMethod {
    Average,
    Product,
    ProductLiteral,
    Holm,
    Hommel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FactMethod {
    Bonferroni,
    Simes,
    Fisher,
    FisherGeneric,
    Max,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassArg {
    Arbitrary,
    Sequential,
    Independent,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Experiment {
    Combining,
    Multiple,
}

/// The clap command, for help output and man page generation.
pub fn command() -> clap::Command {
    Cli::command()
}

/// Failure of a subcommand, with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
    /// A validation check found a violation; the report is already printed.
    Invalid,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `argv` (including the program name), runs the command against the
/// process's standard streams and returns the exit code.
pub fn parse_and_dispatch(argv: &[String]) -> i32 {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(argv, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}

/// As [`parse_and_dispatch`] with explicit streams.
pub fn run(argv: &[String], stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdin, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Invalid) => 1,
    }
}

/// Splits text into numbers at whitespace, commas and newlines. Errors name
/// the offending token and its 1-based position.
pub fn read_values(text: &str) -> crate::error::Result<Vec<f64>> {
    let tokens: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect();
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.parse::<f64>()
                .ok()
                .filter(|x| !x.is_nan())
                .ok_or_else(|| Error::MalformedInput(format!("token {} ({t:?}) is not a number", i + 1)))
        })
        .collect()
}

fn load(input: &Input, stdin: &mut dyn Read) -> std::result::Result<Vec<f64>, Failure> {
    let text = if let Some(path) = &input.input {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    } else if input.values.len() == 1 && input.values[0] == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        s
    } else {
        input.values.join(" ")
    };
    Ok(read_values(&text)?)
}

fn position_error(kind: &str, i: usize, x: f64) -> Failure {
    Failure::Usage(format!("value {x} at position {} is not {kind}", i + 1))
}

fn load_e(input: &Input, stdin: &mut dyn Read) -> std::result::Result<EVector, Failure> {
    let v = load(input, stdin)?;
    if let Some((i, &x)) = v.iter().enumerate().find(|(_, x)| EValue::new(**x).is_err()) {
        return Err(position_error("an e-value", i, x));
    }
    Ok(EVector::new(v)?)
}

fn load_p(input: &Input, stdin: &mut dyn Read) -> std::result::Result<PVector, Failure> {
    let v = load(input, stdin)?;
    if let Some((i, &x)) = v.iter().enumerate().find(|(_, x)| PValue::new(**x).is_err()) {
        return Err(position_error("a p-value", i, x));
    }
    Ok(PVector::new(v)?)
}

fn parse_list(flag: &str, s: &str) -> std::result::Result<Vec<f64>, Failure> {
    read_values(s).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn require<T>(flag: &str, v: Option<T>) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for this method")))
}

fn e_merger(method: MergeEMethod, params: &MergeParams) -> std::result::Result<EMerger, Failure> {
    Ok(match method {
        MergeEMethod::Average => EMerger::Mean,
        MergeEMethod::Mixture => EMerger::ConvexMixture {
            lambda: require("lambda", params.lambda)?,
        },
        MergeEMethod::UStat => EMerger::UStatistic {
            n: require("k", params.k)?,
        },
        MergeEMethod::UMixture => EMerger::UMixture {
            weights: parse_list("weights", &require("weights", params.weights.clone())?)?,
        },
        MergeEMethod::Product => EMerger::Product,
        MergeEMethod::Ruger => EMerger::Ruger {
            k: require("k", params.k)?,
        },
        MergeEMethod::Simes => EMerger::Simes,
        MergeEMethod::MFamily => EMerger::MFamily {
            r: require("r", params.r)?,
        },
    })
}

fn print_lines<T: std::fmt::Display>(out: &mut dyn Write, values: impl IntoIterator<Item = T>) -> io::Result<()> {
    for v in values {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

fn print_row(out: &mut dyn Write, values: &[f64]) -> io::Result<()> {
    let row: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    writeln!(out, "{}", row.join(" "))
}

fn dispatch(command: Command, stdin: &mut dyn Read, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Calibrate { method, kappa, input } => {
            let p = load_p(&input, stdin)?;
            let mut results = Vec::with_capacity(p.len());
            for i in 0..p.len() {
                let x = p.get(i);
                results.push(match method {
                    CalibrateMethod::Power => calibrate_power(x, require("kappa", kappa)?)?.get(),
                    CalibrateMethod::Integrated => calibrate_integrated(x).get(),
                    CalibrateMethod::H => calibrate_h(x, require("kappa", kappa)?)?.get(),
                    CalibrateMethod::F => calibrate_f_kappa(x, require("kappa", kappa)?)?.get(),
                    CalibrateMethod::Vs => vs_bound(x),
                });
            }
            print_lines(out, results)?;
        }
        Command::E2p { input } => {
            let e = load_e(&input, stdin)?;
            print_lines(out, (0..e.len()).map(|i| e_to_p(e.get(i))))?;
        }
        Command::Jeffreys { input } => {
            let e = load_e(&input, stdin)?;
            print_lines(out, (0..e.len()).map(|i| jeffreys_category(e.get(i))))?;
        }
        Command::MergeE { method, params, input } => {
            let merger = e_merger(method, &params)?;
            let e = load_e(&input, stdin)?;
            writeln!(out, "{}", merger.apply(&e)?)?;
        }
        Command::MergeP { method, k, input } => {
            let merger = match method {
                MergePMethod::Bonferroni => PMerger::Bonferroni,
                MergePMethod::Ruger => PMerger::Ruger { k: require("k", k)? },
                MergePMethod::Simes => PMerger::Simes,
                MergePMethod::Fisher => PMerger::Fisher,
                MergePMethod::Max => PMerger::Maximum,
            };
            let p = load_p(&input, stdin)?;
            writeln!(out, "{}", merger.apply(&p)?)?;
        }
        Command::Cross {
            method,
            kappa,
            weights,
            calibrators,
            input,
        } => match method {
            CrossMethod::E2p => writeln!(out, "{}", e_to_p_merge(&load_e(&input, stdin)?))?,
            CrossMethod::Ville => writeln!(out, "{}", ville_se_to_p(&load_e(&input, stdin)?))?,
            CrossMethod::P2e => {
                let kappa = require("kappa", kappa)?;
                writeln!(out, "{}", p_to_e_merge(kappa, &load_p(&input, stdin)?)?)?
            }
            CrossMethod::Mixture => {
                let weights = parse_list("weights", &require("weights", weights)?)?;
                let specs = require("calibrators", calibrators)?
                    .split(',')
                    .map(|s| CalibratorSpec::parse(s.trim()))
                    .collect::<crate::error::Result<Vec<_>>>()?;
                let p = load_p(&input, stdin)?;
                writeln!(out, "{}", p_to_e_mixture(&weights, &specs, &p)?)?
            }
        },
        Command::Adjust { method, input } => {
            let adjusted = match method {
                AdjustMethod::Average => adjust_e_average(&load_e(&input, stdin)?).adjusted.into_vec(),
                AdjustMethod::Product => adjust_e_product_with(&load_e(&input, stdin)?, ProductAdjustment::Closure)
                    .adjusted
                    .into_vec(),
                AdjustMethod::ProductLiteral => {
                    adjust_e_product_with(&load_e(&input, stdin)?, ProductAdjustment::PseudocodeLiteral)
                        .adjusted
                        .into_vec()
                }
                AdjustMethod::Holm => holm_adjust(&load_p(&input, stdin)?).adjusted.into_vec(),
                AdjustMethod::Hommel => hommel_adjust(&load_p(&input, stdin)?).adjusted.into_vec(),
            };
            print_row(out, &adjusted)?;
        }
        Command::Fact { method, input } => {
            let p = load_p(&input, stdin)?;
            let adjusted = match method {
                FactMethod::Fisher => fact_fisher(&p)?,
                FactMethod::Bonferroni => fact_generic(|s| PMerger::Bonferroni.apply(s), &p)?,
                FactMethod::Simes => fact_generic(|s| PMerger::Simes.apply(s), &p)?,
                FactMethod::FisherGeneric => fact_generic(|s| PMerger::Fisher.apply(s), &p)?,
                FactMethod::Max => fact_generic(|s| PMerger::Maximum.apply(s), &p)?,
            };
            print_row(out, &adjusted.adjusted)?;
        }
        Command::Validate {
            method,
            params,
            class,
            dim,
            trials,
            seed,
            scale,
        } => validate(
            out,
            method,
            &params,
            class,
            ValidityConfig::new(dim, trials, seed),
            scale,
        )?,
        Command::Simulate(args) => simulate(out, args)?,
    }
    Ok(())
}

fn validate(
    out: &mut dyn Write,
    method: MergeEMethod,
    params: &MergeParams,
    class: ClassArg,
    cfg: ValidityConfig,
    scale: f64,
) -> Outcome {
    if !(scale >= 0.0) || scale.is_infinite() {
        return Err(Failure::Usage(format!(
            "--scale {scale} must be finite and nonnegative"
        )));
    }
    let merger = e_merger(method, params)?;
    // Surface parameter errors once, before the trials run.
    merger.apply(&EVector::new(vec![1.0; cfg.dim])?)?;
    let class = match class {
        ClassArg::Arbitrary => MergeClass::Arbitrary,
        ClassArg::Sequential => MergeClass::Sequential,
        ClassArg::Independent => MergeClass::Independent,
    };
    let f = |e: &EVector| {
        let v = merger.apply(e).expect("parameters checked above").get();
        EValue::new(scale * v).unwrap_or(EValue::INFINITY)
    };
    match check_e_merging_validity(f, class, cfg)? {
        ValidityOutcome::Pass {
            trials,
            max_expectation,
        } => {
            writeln!(
                out,
                "pass {merger} class={class} trials={trials} max_expectation={max_expectation}"
            )?;
            Ok(())
        }
        ValidityOutcome::Fail {
            trial,
            expectation,
            witness,
        } => {
            writeln!(
                out,
                "fail {merger} class={class} trial={trial} expectation={expectation}"
            )?;
            writeln!(out, "witness coupling={:?}", witness.coupling())?;
            writeln!(out, "prob,values")?;
            for (row, q) in witness.support().iter().zip(witness.probs()) {
                let values: Vec<String> = row.iter().map(f64::to_string).collect();
                writeln!(out, "{q},{}", values.join(" "))?;
            }
            Err(Failure::Invalid)
        }
    }
}

fn simulate(out: &mut dyn Write, args: SimulateArgs) -> Outcome {
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let series = match args.experiment {
        Experiment::Combining => {
            let d = CombiningConfig::figure2();
            let cfg = CombiningConfig {
                delta: args.delta.unwrap_or(d.delta),
                n_obs: args.n_obs.unwrap_or(d.n_obs),
                n_seeds: args.seeds.unwrap_or(d.n_seeds),
                fraction_alternative: args.fraction_alt.unwrap_or(d.fraction_alternative),
                methods: parse_methods(&args.method, CombiningMethod::parse)?,
            };
            run_combining_experiment(&cfg, args.seed, exec)?
        }
        Experiment::Multiple => {
            let d = MultipleConfig::figure4();
            let cfg = MultipleConfig {
                n_hypotheses: args.n_hyp.unwrap_or(d.n_hypotheses),
                n_false: args.n_false.unwrap_or(d.n_false),
                delta: args.delta.unwrap_or(d.delta),
                n_seeds: args.seeds.unwrap_or(d.n_seeds),
                methods: parse_methods(&args.method, MultipleMethod::parse)?,
            };
            run_multiple_experiment(&cfg, args.seed, exec)?
        }
    };
    match &args.out {
        Some(path) => series
            .write_csv(path)
            .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?,
        None => out.write_all(series.to_csv().as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn read_values_examples() {
        assert_eq!(read_values("1, 2\n3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(matches!(read_values(""), Err(Error::EmptyInput)));
        let msg = read_values("0.5 abc").unwrap_err().to_string();
        assert!(msg.contains("token 2"), "{msg}");
        assert!(read_values("nan").is_err());
    }

    #[test]
    fn command_is_well_formed() {
        command().debug_assert();
    }
}
