use std::f64::consts::LN_2;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cq_combine::bounds::LogBase;
use cq_combine::experiments::{self, ChannelSpec, Command, ExperimentConfig, Outcome};
use cq_combine::polar::DimensionBudget;
use cq_combine::{Error, PriorMode};

#[derive(Parser, Debug)]
#[command(name = "cqbounds", version, about = "Information-combining experiments for binary-input cq channels")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 50_000)]
    samples: usize,
    /// Output dimension(s); repeat or comma-separate.
    #[arg(long = "dim", global = true, value_delimiter = ',', default_value = "2")]
    dims: Vec<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Prior::Half)]
    prior: Prior,
    #[arg(long, global = true, default_value_t = 101)]
    grid: usize,
    /// Lower capacity threshold, in the unit given by --base (default 0.05 log 2).
    #[arg(long, global = true)]
    a: Option<f64>,
    /// Upper capacity threshold, in the unit given by --base (default 0.95 log 2).
    #[arg(long, global = true)]
    b: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Base::Nat)]
    base: Base,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Random pairs against every bound (CSV + summary JSON).
    Sweep {
        /// Draw the two channels independently instead of using (W, W).
        #[arg(long)]
        independent: bool,
    },
    /// Bound curves on an entropy grid.
    Curves,
    /// Duality identities over random pairs.
    Duality,
    /// Polarization statistics per level.
    Polarize(PolarArgs),
    /// Decay of E[T] per level with model fits.
    Speed(PolarArgs),
}

#[derive(clap::Args, Debug)]
struct PolarArgs {
    #[arg(long, value_enum, default_value_t = Kind::Bec)]
    channel: Kind,
    /// Erasure / crossover probability, pure-state angle, or list length for mixed-bec.
    #[arg(long, default_value_t = 0.5)]
    param: f64,
    #[arg(long, default_value_t = 16)]
    levels: usize,
    #[arg(long, default_value_t = DimensionBudget::default().max_block_dim)]
    max_block_dim: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Prior {
    Half,
    Uniform,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Base {
    Nat,
    Bits,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Bec,
    Bsc,
    BecEmbed,
    BscEmbed,
    Pure,
    Random,
    MixedBec,
}

fn config(cli: Cli) -> ExperimentConfig {
    let log_base = match cli.base {
        Base::Nat => LogBase::Nat,
        Base::Bits => LogBase::Bits,
    };
    let to_nats = |v: f64| if log_base == LogBase::Bits { v * LN_2 } else { v };
    let mut cfg = ExperimentConfig {
        seed: cli.seed,
        samples: cli.samples,
        dims: cli.dims,
        grid: cli.grid,
        a: cli.a.map_or(0.05 * LN_2, to_nats),
        b: cli.b.map_or(0.95 * LN_2, to_nats),
        log_base,
        out_path: cli.out,
        prior: match cli.prior {
            Prior::Half => PriorMode::Half,
            Prior::Uniform => PriorMode::Uniform,
        },
        ..Default::default()
    };
    let polar = |cfg: &mut ExperimentConfig, args: PolarArgs| {
        let p = args.param;
        cfg.channel = match args.channel {
            Kind::Bec => ChannelSpec::Bec(p),
            Kind::Bsc => ChannelSpec::Bsc(p),
            Kind::BecEmbed => ChannelSpec::BecEmbed(p),
            Kind::BscEmbed => ChannelSpec::BscEmbed(p),
            Kind::Pure => ChannelSpec::Pure(p),
            Kind::Random => ChannelSpec::Random(cfg.dims[0]),
            Kind::MixedBec => ChannelSpec::MixedBec(p as usize),
        };
        cfg.levels = args.levels;
        cfg.budget.max_block_dim = args.max_block_dim;
    };
    match cli.command {
        Cmd::Sweep { independent } => {
            cfg.command = Command::Sweep;
            cfg.identical_pairs = !independent;
        }
        Cmd::Curves => cfg.command = Command::Curves,
        Cmd::Duality => cfg.command = Command::Duality,
        Cmd::Polarize(args) => {
            cfg.command = Command::Polarize;
            polar(&mut cfg, args);
        }
        Cmd::Speed(args) => {
            cfg.command = Command::Speed;
            polar(&mut cfg, args);
        }
    }
    cfg
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = config(cli);
    match experiments::run(&cfg) {
        Ok(Outcome::Ok) => {
            println!("wrote results to {}", cfg.out_path.display());
            ExitCode::SUCCESS
        }
        Ok(Outcome::ProvenViolation) => {
            eprintln!("proven bound violated; see {}", cfg.out_path.display());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ChainRuleViolation(_) => 2,
                ref e if e.is_io() => 3,
                _ => 1,
            })
        }
    }
}
