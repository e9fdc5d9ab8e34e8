//! `stochan`: analyze, twirl, and compare stochastic quantum channels.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stochan::diamond::{diamond_distance, DiamondOptions};
use stochan::formats::{channel_to_json, load_channel, load_design};
use stochan::stochastic::{search_nonunital, SearchOptions, STOCHASTIC_TOL};
use stochan::suites::{run_suite, Suite};
use stochan::twirl::twirl;
use stochan::{stochastic_eigenvalue, Channel, TwirlMethod};

use report::{render, AnalysisReport, DiamondReport, SearchReport, TwirlReport};

#[derive(Parser)]
#[command(name = "stochan", version, about = "Stochastic quantum channel toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ChannelArg {
    /// Channel file or constructor key such as `nonunital-example:0.9,4`.
    #[arg(value_name = "CHANNEL")]
    positional: Option<String>,
    #[arg(long = "channel", value_name = "CHANNEL", conflicts_with = "positional")]
    flag: Option<String>,
}

impl ChannelArg {
    fn input(&self) -> Result<&str, Failure> {
        self.positional
            .as_deref()
            .or(self.flag.as_deref())
            .ok_or_else(|| Failure::User("a channel file or key is required".into()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Definition,
    Choi,
    Both,
}

impl From<MethodArg> for TwirlMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Definition => TwirlMethod::Definition,
            MethodArg::Choi => TwirlMethod::Choi,
            MethodArg::Both => TwirlMethod::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// CPTP validation, stochastic detection, process fidelity, optional diamond distance.
    Analyze {
        #[command(flatten)]
        channel: ChannelArg,
        /// Also compute the diamond distance to the identity.
        #[arg(long)]
        diamond: bool,
        /// Solve the SDP even when the stochastic fast path applies.
        #[arg(long)]
        force_sdp: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tolerance for stochastic detection.
        #[arg(long, default_value_t = STOCHASTIC_TOL)]
        tol: f64,
    },
    /// Twirl a channel over a unitary 1-design.
    Twirl {
        #[command(flatten)]
        channel: ChannelArg,
        /// Design key (`pauli:n`, `wh:d`, `rotated:<key>:<unitary-file>`) or design file.
        #[arg(long)]
        design: String,
        #[arg(long, value_enum, default_value = "choi")]
        method: MethodArg,
        /// Write the twirled channel here in the channel file format.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = STOCHASTIC_TOL)]
        tol: f64,
    },
    /// Diamond distance to the identity with certified bounds.
    Diamond {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long)]
        force_sdp: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a reproduction suite: thm1, thm2-3, thm4, lemma1, designs, example, kernel, all.
    Reproduce {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for the most non-unital stochastic channel in dimension `dim`.
    Search {
        #[arg(long)]
        dim: usize,
        /// Fix the identity weight instead of optimizing it.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Bad input: exit code 2.
    User(String),
    /// Checks failed without an input error: exit code 1.
    Checks,
}

impl From<stochan::Error> for Failure {
    fn from(e: stochan::Error) -> Self {
        Failure::User(e.to_string())
    }
}

fn write_channel(path: &PathBuf, ch: &Channel) -> Result<String, Failure> {
    std::fs::write(path, channel_to_json(ch) + "\n")
        .map_err(|e| Failure::User(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

fn analyze(input: &str, diamond: bool, force_sdp: bool, seed: u64, tol: f64) -> Result<(), Failure> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::User(format!("--tol must be positive, got {tol}")));
    }
    let ch = load_channel(input)?;
    let cptp = ch.validate();
    let mut notes = Vec::new();
    let valid = cptp.is_cptp();
    let lambda = if valid { stochastic_eigenvalue(&ch, tol) } else { None };
    let diamond = if diamond && valid {
        Some(diamond_distance(&ch, &DiamondOptions { force_sdp, seed, ..Default::default() })?)
    } else {
        None
    };
    if !valid {
        notes.push("channel is not CPTP; stochastic detection and diamond distance skipped".into());
    }
    if let Some(l) = lambda {
        notes.push(format!("stochastic: lambda id + (1 - lambda) Phi_perp with lambda = {l:.12}"));
        if !cptp.is_unital {
            notes.push("stochastic and not unital".into());
        }
    }
    let report = AnalysisReport {
        channel_id: input.to_string(),
        dim: ch.dim(),
        cptp,
        stochastic_lambda: lambda,
        process_fidelity: ch.process_fidelity(),
        process_infidelity: ch.process_infidelity(),
        is_unital: cptp.is_unital,
        diamond,
        notes,
    };
    println!("{}", render(&report));
    if valid {
        Ok(())
    } else {
        Err(Failure::User(format!("{input} is not CPTP")))
    }
}

fn twirl_cmd(input: &str, design: &str, method: MethodArg, out: Option<&PathBuf>, tol: f64) -> Result<(), Failure> {
    let ch = load_channel(input)?;
    ch.ensure_cptp()?;
    let mu = load_design(design)?;
    let outcome = twirl(&ch, &mu, method.into())?;
    let output = out.map(|p| write_channel(p, &outcome.channel)).transpose()?;
    let report = TwirlReport {
        channel_id: input.to_string(),
        design: design.to_string(),
        design_size: mu.len(),
        method: format!("{:?}", TwirlMethod::from(method)).to_lowercase(),
        dim: ch.dim(),
        input_process_fidelity: ch.process_fidelity(),
        stochastic_lambda: stochastic_eigenvalue(&outcome.channel, tol),
        unitality_residual: outcome.channel.unitality_residual(),
        route_deviation: outcome.deviation,
        output,
    };
    println!("{}", render(&report));
    Ok(())
}

fn diamond_cmd(input: &str, force_sdp: bool, seed: u64) -> Result<(), Failure> {
    let ch = load_channel(input)?;
    let result = diamond_distance(&ch, &DiamondOptions { force_sdp, seed, ..Default::default() })?;
    let report = DiamondReport {
        channel_id: input.to_string(),
        dim: ch.dim(),
        process_infidelity: ch.process_infidelity(),
        result,
    };
    println!("{}", render(&report));
    Ok(())
}

fn reproduce(name: &str, seed: u64) -> Result<(), Failure> {
    let suite: Suite = name.parse()?;
    let checks = run_suite(suite, seed);
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{c}");
    }
    println!("{name}: {}/{} checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn search(dim: usize, lambda: Option<f64>, restarts: usize, seed: u64, out: Option<&PathBuf>) -> Result<(), Failure> {
    if !(2..=6).contains(&dim) {
        return Err(Failure::User(format!("--dim must be in 2..=6, got {dim}")));
    }
    let found = search_nonunital(dim, seed, restarts, &SearchOptions { lambda, ..Default::default() })?;
    let output = out.map(|p| write_channel(p, &found.witness)).transpose()?;
    let report = SearchReport {
        dim,
        lambda: found.lambda,
        best_nonunitality: found.best_nonunitality,
        tp_residual: found.tp_residual,
        per_restart: found.per_restart,
        output,
    };
    println!("{}", render(&report));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { channel, diamond, force_sdp, seed, tol } => {
            analyze(channel.input()?, diamond, force_sdp, seed, tol)
        }
        Command::Twirl { channel, design, method, out, tol } => {
            twirl_cmd(channel.input()?, &design, method, out.as_ref(), tol)
        }
        Command::Diamond { channel, force_sdp, seed } => diamond_cmd(channel.input()?, force_sdp, seed),
        Command::Reproduce { suite, seed } => reproduce(&suite, seed),
        Command::Search { dim, lambda, restarts, seed, out } => search(dim, lambda, restarts, seed, out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::User(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Checks)) => ExitCode::from(1),
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(1)
        }
    }
}
