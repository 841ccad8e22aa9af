use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use cf_sim::commands;
use cf_sim::config::{
    resolve_campaign, Campaign, CampaignArgs, OutputArgs, RateArgs, RateSettings, SearchArgs, SearchSettings,
};
use cf_sim::exec::RayonExecutor;
use cf_sim::table::OutputTable;
use cf_sim::CliError;
use clap::{Args, Parser, Subcommand};

/// Compute-and-forward rate calculator and Monte Carlo simulator.
///
/// Rates are in bits per channel use (base-2 logarithm). Set CF_SIM_THREADS
/// to cap the worker threads (0 = one per core).
#[derive(Debug, Parser)]
#[command(name = "cf-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CampaignCmd {
    #[command(flatten)]
    params: CampaignArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// MMSE scaling, f(a) and computation rate for one channel and coefficient vector.
    Rate(RateArgs),
    /// Optimal coefficient vector for one channel.
    Search(SearchArgs),
    /// Probability that a relay's optimal vector is not a unit vector, with bounds.
    ProbUnit(CampaignCmd),
    /// Sum-rate of M relays versus the number of simultaneous users.
    Sumrate(CampaignCmd),
    /// Round-robin scheduled sum-rate and per-user throughput.
    Schedule(CampaignCmd),
    /// Lower bound, optimal sum-rate and upper bound versus power (L = M).
    Bounds(CampaignCmd),
    /// Statistical and identity self-checks; exits 4 if any fails.
    Validate(CampaignCmd),
}

fn emit(table: &OutputTable, out: &OutputArgs) -> Result<(), CliError> {
    match &out.output {
        Some(path) => {
            let file = File::create(path)?;
            let mut w = BufWriter::new(file);
            table.write(out.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(out.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run_campaign(campaign: Campaign, args: &CampaignCmd) -> Result<(), CliError> {
    let cfg = resolve_campaign(campaign, &args.params)?;
    let exec = RayonExecutor::from_env(args.out.progress)?;
    let table = match campaign {
        Campaign::ProbUnit => commands::prob_unit(&cfg, &exec)?,
        Campaign::SumRate => commands::sumrate(&cfg, &exec)?,
        Campaign::Schedule => commands::schedule(&cfg, &exec)?,
        Campaign::Bounds => commands::bounds(&cfg, &exec)?,
        Campaign::Validate => {
            let (table, passed) = commands::validate(&cfg)?;
            emit(&table, &args.out)?;
            return if passed {
                Ok(())
            } else {
                Err(CliError::Validation("validation failed".into()))
            };
        }
    };
    emit(&table, &args.out)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rate(args) => emit(&commands::rate(&RateSettings::resolve(&args)?)?, &args.out),
        Command::Search(args) => emit(&commands::search(&SearchSettings::resolve(&args)?)?, &args.out),
        Command::ProbUnit(a) => run_campaign(Campaign::ProbUnit, &a),
        Command::Sumrate(a) => run_campaign(Campaign::SumRate, &a),
        Command::Schedule(a) => run_campaign(Campaign::Schedule, &a),
        Command::Bounds(a) => run_campaign(Campaign::Bounds, &a),
        Command::Validate(a) => run_campaign(Campaign::Validate, &a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cf-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
