use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wavefront::bench::{self, Algorithm, Config, Split};
use wavefront::model::write_params;
use wavefront::trainers::{self, write_dataset, write_history_csv, EvalSummary};
use wavefront::{Error, Result};

/// Learned vertex-selection heuristics for best-first grid search.
#[derive(Parser, Debug)]
#[command(name = "wavefront", version)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set train.iterations=5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate train/test/validation worlds and a manifest.
    GenData {
        /// Output directory; overrides data.dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a learner and save its parameters under bench.models_dir.
    Train(AlgoArgs),
    /// Evaluate one algorithm on a split.
    Evaluate(AlgoArgs),
    /// Benchmark every configured algorithm on the test split.
    Bench {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write frontier snapshots of one episode.
    Render {
        #[command(flatten)]
        algo: AlgoArgs,
        /// Episode index within the split.
        #[arg(long, default_value_t = 0)]
        episode: usize,
        /// Overrides render.every.
        #[arg(long)]
        every: Option<usize>,
        /// Paint start and goal markers.
        #[arg(long)]
        markers: bool,
        /// Overlay the solution path.
        #[arg(long)]
        path: bool,
    },
}

#[derive(Args, Debug)]
struct AlgoArgs {
    #[arg(long, short)]
    algorithm: String,
    #[arg(long, default_value = "test")]
    split: String,
    /// Output directory; defaults to bench.models_dir for `train` and
    /// bench.out_dir otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl AlgoArgs {
    fn algorithm(&self) -> Result<Algorithm> {
        self.algorithm.parse()
    }

    fn split(&self) -> Result<Split> {
        Split::ALL
            .into_iter()
            .find(|s| s.name() == self.split)
            .ok_or_else(|| Error::Config(format!("unknown split `{}`", self.split)))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = Config::load(cli.config.as_deref(), &cli.overrides)?;
    match cli.command {
        Command::GenData { out } => {
            if let Some(dir) = out {
                cfg.data.dir = dir;
            }
            let m = bench::make_dataset(&cfg.data, &cfg.generator, &cfg.data.dir, cfg.train.exec)?;
            cfg.write_resolved(&cfg.data.dir)?;
            println!("wrote {} worlds to {}", m.entries.len(), cfg.data.dir.display());
        }
        Command::Train(args) => {
            let alg = args.algorithm()?;
            if let Some(dir) = &args.out {
                cfg.bench.models_dir = dir.clone();
            }
            train(&cfg, alg)?;
        }
        Command::Evaluate(args) => {
            let (alg, split) = (args.algorithm()?, args.split()?);
            let out = args.out.clone().unwrap_or_else(|| cfg.bench.out_dir.clone());
            let specs = bench::load_split(&cfg.data.dir, split)?;
            let model = alg.load_model(&cfg.bench.models_dir)?;
            let policy = alg.policy(model.as_ref(), cfg.bench.random_seed)?;
            let s = trainers::evaluate_policy(&policy, &specs, cfg.train.t_test, cfg.train.exec)?;
            fs::create_dir_all(&out)?;
            let file = out.join(format!("evaluate_{}_{}.csv", alg.name().to_lowercase(), split.name()));
            write_eval_csv(&s, &file)?;
            cfg.write_resolved(&out)?;
            println!(
                "{alg} on {}: mean normalized {:.4}, median {:.4}, success {:.3} ({} episodes)",
                split.name(),
                s.mean_normalized(),
                s.median_normalized(),
                s.success_rate(),
                s.episodes.len()
            );
        }
        Command::Bench { out } => {
            if let Some(dir) = out {
                cfg.bench.out_dir = dir;
            }
            let report = bench::run_benchmark(&cfg)?;
            report.write_all(&cfg.bench.out_dir)?;
            print!("{}", report.summary());
        }
        Command::Render { algo, episode, every, markers, path } => {
            let (alg, split) = (algo.algorithm()?, algo.split()?);
            if let Some(n) = every {
                cfg.render.every = n;
            }
            cfg.render.markers |= markers;
            cfg.render.path |= path;
            let specs = bench::load_split(&cfg.data.dir, split)?;
            let spec = specs
                .get(episode)
                .ok_or_else(|| Error::Config(format!("episode {episode} outside the {} split", split.name())))?;
            let model = alg.load_model(&cfg.bench.models_dir)?;
            let policy = alg.policy(model.as_ref(), cfg.bench.random_seed)?;
            let base = algo.out.clone().unwrap_or_else(|| cfg.bench.out_dir.clone());
            let dir = base.join("render").join(format!("{}_{}_{episode}", alg.name().to_lowercase(), split.name()));
            let (r, frames) =
                bench::render_episode(spec, &policy, cfg.train.t_test, episode as u64, &cfg.render, &dir)?;
            cfg.write_resolved(&dir)?;
            println!("{:?} after {} expansions; {} frames in {}", r.outcome, r.expansions, frames.len(), dir.display());
        }
    }
    Ok(())
}

fn train(cfg: &Config, alg: Algorithm) -> Result<()> {
    let train = bench::load_split(&cfg.data.dir, Split::Train)?;
    let val = bench::load_split(&cfg.data.dir, Split::Validation)?;
    let out = match alg {
        Algorithm::Sail => trainers::sail_train(&cfg.train, &train, &val)?,
        Algorithm::Sl => trainers::sl_train(&cfg.train, &train, &val)?,
        Algorithm::Ql => trainers::ql_train(&cfg.train, &train, &val)?,
        Algorithm::Cem => trainers::cem_train(&cfg.train, &train, &val)?,
        other => return Err(Error::Config(format!("{other} is not a trainable algorithm"))),
    };
    let dir = &cfg.bench.models_dir;
    fs::create_dir_all(dir)?;
    let stem = alg.name().to_lowercase();
    write_params(&out.params, dir.join(alg.model_file()))?;
    write_history_csv(&out.history, fs::File::create(dir.join(format!("{stem}_curve.csv")))?)?;
    if !out.dataset.is_empty() {
        write_dataset(&out.dataset, dir.join(format!("{stem}_dataset.bin")))?;
    }
    cfg.write_resolved(dir)?;
    println!(
        "{alg}: best iteration {} of {}, validation mean cost {:.1}",
        out.best_iteration,
        out.history.len(),
        out.history[out.best_iteration - 1].val_mean_cost
    );
    Ok(())
}

fn write_eval_csv(s: &EvalSummary, path: &Path) -> Result<()> {
    use std::io::Write;
    let mut f = fs::File::create(path)?;
    writeln!(f, "episode,outcome,expansions,cost,normalized_cost")?;
    for (i, e) in s.episodes.iter().enumerate() {
        writeln!(
            f,
            "{i},{},{},{},{:.6}",
            e.outcome.name(),
            e.expansions,
            e.cost,
            e.cost as f64 / s.horizon as f64
        )?;
    }
    Ok(())
}
