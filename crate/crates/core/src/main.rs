use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wqsim::scenarios::{self, Overrides, Scope};

#[derive(Debug, Parser)]
#[command(
    name = "wqsim",
    version,
    about = "Atoms coupled to a waveguide terminated by a mirror"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "k-points")]
        k_points: Option<usize>,
        /// Also write SVG renderings.
        #[arg(long)]
        plot: bool,
    },
    /// Reproduce one of the built-in figure presets.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(scenarios::PRESET_NAMES))]
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: bool,
    },
    /// Run a verification suite; exits 0 only if every check passes.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(["theorem1", "theorem2", "theorem3", "theorem4", "markov", "oracle", "all"]))]
        scope: String,
    },
}

fn run(cli: Cli) -> wqsim::Result<ExitCode> {
    let pool = scenarios::thread_pool()?;
    pool.install(|| match cli.command {
        Command::Simulate {
            config,
            out,
            t_end,
            dt,
            k_points,
            plot,
        } => {
            let file = scenarios::read_config(&config)?;
            let summary = scenarios::simulate(&file, &Overrides { t_end, dt, k_points }, &out, plot)?;
            report_run(&summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::Preset { name, out, plot } => {
            let summary = scenarios::run_preset(&name, &out, plot)?;
            report_run(&summary);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { scope } => {
            let report = scenarios::verify(scope.parse::<Scope>()?);
            println!("{report}");
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    })
}

fn report_run(summary: &scenarios::RunSummary) {
    println!("{}", summary.classify_line());
    for (label, results) in &summary.results {
        for (key, value) in results {
            println!("{label}.{key} = {value:.6}");
        }
    }
    println!("wrote {} files to {}", summary.files.len(), summary.out_dir.display());
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
