//! `spinglass`: batch front end for disorder sweeps, per-state reports,
//! random-state ensembles and scaling fits.
//!
//! Exit status is 0 on success, 1 on a numerical or invariant failure and 2 on
//! a configuration error. `SPINGLASS_WORKERS` sets the number of worker
//! threads.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use spinglass_core::ensembles::PairPolicy;
use spinglass_core::experiment::{self, ExperimentConfig, ScalingTarget};
use spinglass_core::ladder::LadderTolerance;
use spinglass_core::{verify, CouplingModel, Error};

const WORKERS_ENV: &str = "SPINGLASS_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "spinglass", version, about = "Entanglement of eigenstates of disordered Heisenberg models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-eigenstate energies, concurrence, PR and promoted labels.
    Spectrum(RunArgs),
    /// Pooled scatter data for a list of decay exponents.
    PhaseDiagram(RunArgs),
    /// Concurrence and entangled-pair probability against L, with fits.
    Scaling(RunArgs),
    /// Run the built-in invariant checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Ir,
    Nn,
    Pl,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PairsArg {
    All,
    Single,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Eigenstates,
    Random,
    RandomPromoted,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "ir")]
    model: ModelArg,
    /// Decay exponent(s), comma separated; `inf` is nearest neighbour.
    #[arg(long, value_delimiter = ',', value_parser = parse_sigma)]
    sigma: Vec<f64>,
    /// System sizes: `25`, `8,12,16` or `8-40:4`.
    #[arg(short = 'L', value_parser = parse_sizes, default_value = "25")]
    sizes: SizeList,
    /// Particle number of the sector.
    #[arg(short = 'm', default_value_t = 2)]
    particles: usize,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "single")]
    pairs: PairsArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "eigenstates")]
    target: TargetArg,
    /// Degeneracy tolerance; defaults to 1e-8 times the Frobenius norm.
    #[arg(long)]
    degtol: Option<f64>,
    /// Threshold on the ladder eigenvalue; the ambiguity band is half of it.
    #[arg(long, default_value_t = 0.5)]
    ladder_tol: f64,
    /// Also write the couplings and sector matrix of every sample.
    #[arg(long)]
    dump_hamiltonian: bool,
}

#[derive(Clone, Debug)]
struct SizeList(Vec<usize>);

fn parse_sigma(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| format!("bad sigma {t:?}: {e}")),
    }
}

fn parse_sizes(s: &str) -> Result<SizeList, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad size {t:?}: {e}"));
    let mut out = Vec::new();
    for part in s.split(',') {
        if let Some((lo, rest)) = part.split_once('-') {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (num(hi)?, num(step)?),
                None => (num(rest)?, 1),
            };
            let lo = num(lo)?;
            if step == 0 || hi < lo {
                return Err(format!("bad range {part:?}"));
            }
            out.extend((lo..=hi).step_by(step));
        } else {
            out.push(num(part)?);
        }
    }
    Ok(SizeList(out))
}

impl RunArgs {
    fn config(&self, sweep_sigmas: bool) -> Result<ExperimentConfig, Error> {
        let model = match (self.model, sweep_sigmas) {
            (_, true) => CouplingModel::InfiniteRange,
            (ModelArg::Ir, _) | (ModelArg::Nn, _) if !self.sigma.is_empty() => {
                return Err(Error::InvalidConfig("--sigma only applies to --model pl".into()))
            }
            (ModelArg::Ir, _) => CouplingModel::InfiniteRange,
            (ModelArg::Nn, _) => CouplingModel::NearestNeighbour,
            (ModelArg::Pl, _) => match self.sigma.as_slice() {
                [s] => CouplingModel::power_law(*s)?,
                _ => return Err(Error::InvalidConfig("--model pl needs exactly one --sigma".into())),
            },
        };
        let defaults = ExperimentConfig::default();
        let sigmas = if sweep_sigmas && !self.sigma.is_empty() {
            self.sigma.clone()
        } else {
            defaults.sigmas
        };
        Ok(ExperimentConfig {
            model,
            sigmas,
            sizes: self.sizes.0.clone(),
            particles: self.particles,
            samples: self.samples,
            seed: self.seed,
            pairs: match self.pairs {
                PairsArg::All => PairPolicy::AllPairs,
                PairsArg::Single => PairPolicy::SinglePair,
            },
            degtol: self.degtol,
            ladder_tol: LadderTolerance {
                threshold: self.ladder_tol,
                band: self.ladder_tol / 2.0,
            },
            target: match self.target {
                TargetArg::Eigenstates => ScalingTarget::Eigenstates,
                TargetArg::Random => ScalingTarget::Random,
                TargetArg::RandomPromoted => ScalingTarget::RandomPromoted,
            },
            dump_hamiltonian: self.dump_hamiltonian,
        })
    }
}

fn setup_workers() -> Result<(), Error> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidConfig(format!("{WORKERS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidConfig(e.to_string()))
}

/// Returns whether every check passed.
fn run(cli: Cli) -> Result<bool> {
    setup_workers()?;
    let (args, files) = match &cli.command {
        Command::Verify { seed } => {
            let report = verify::run_checks(*seed);
            print!("{}", report.render());
            return Ok(report.passed());
        }
        Command::Spectrum(a) => (a, experiment::spectrum_report(&a.config(false)?)?),
        Command::PhaseDiagram(a) => (a, experiment::phase_diagram(&a.config(true)?)?),
        Command::Scaling(a) => (a, experiment::scaling(&a.config(false)?)?),
    };
    experiment::write_outputs(&args.out, &files).with_context(|| format!("writing to {}", args.out.display()))?;
    for f in &files {
        eprintln!("wrote {}", args.out.join(&f.name).display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.downcast_ref::<Error>().map(Error::is_config).unwrap_or(false);
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_lists() {
        assert_eq!(parse_sizes("25").unwrap().0, vec![25]);
        assert_eq!(parse_sizes("8,12,16").unwrap().0, vec![8, 12, 16]);
        assert_eq!(parse_sizes("8-16:4,20").unwrap().0, vec![8, 12, 16, 20]);
        assert_eq!(parse_sizes("3-5").unwrap().0, vec![3, 4, 5]);
        assert!(parse_sizes("9-3").is_err());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn sigma_values() {
        assert_eq!(parse_sigma("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_sigma("2.5").unwrap(), 2.5);
        assert!(parse_sigma("abc").is_err());
    }

    #[test]
    fn infinite_sigma_selects_nearest_neighbour() {
        let cli = Cli::try_parse_from(["spinglass", "spectrum", "--model", "pl", "--sigma", "inf"]).unwrap();
        let Command::Spectrum(a) = cli.command else { panic!() };
        assert_eq!(a.config(false).unwrap().model, CouplingModel::NearestNeighbour);
    }
}
