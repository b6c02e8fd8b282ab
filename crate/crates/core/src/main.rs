use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ordolex::par::Execution;
use ordolex::pipeline::{self, config::SEED_ENV, Overrides, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "ordolex",
    version,
    about = "Constituent-order variants and dependency-length analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter CoNLL-U inputs and generate counterfactual orders.
    Variants(Common),
    /// Positional length profiles and strategy comparisons.
    Stats {
        #[command(flatten)]
        common: Common,
        /// Variant table; defaults to <out>/variants.tsv.
        #[arg(long)]
        variants: Option<PathBuf>,
    },
    /// Fit and cross-validate the ranking models.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variants: Option<PathBuf>,
    },
    /// Collect all result tables into report.txt.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CoNLL-U input; repeatable.
    #[arg(long = "input")]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of variants per sentence.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Largest constituent count reported by `stats`.
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    count_punct: Option<bool>,
    #[arg(long)]
    min_preverbal: Option<usize>,
    /// Comma-separated UPOS tags allowed at the root.
    #[arg(long)]
    root_upos: Option<String>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn resolve(self) -> ordolex::Result<PipelineConfig> {
        let overrides = Overrides {
            inputs: self.inputs,
            out_dir: self.out,
            seed: self.seed,
            cap: self.cap,
            folds: self.folds,
            max_n: self.max_n,
            count_punct: self.count_punct,
            min_preverbal: self.min_preverbal,
            root_upos: self.root_upos.map(|s| vec![s]),
        };
        let env_seed = std::env::var(SEED_ENV).ok();
        let mut cfg =
            PipelineConfig::resolve(self.config.as_deref(), overrides, env_seed.as_deref())?;
        if self.sequential {
            cfg.execution = Execution::Sequential;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> ordolex::Result<()> {
    match cli.command {
        Command::Variants(common) => {
            let cfg = common.resolve()?;
            let summary = pipeline::cmd_variants(&cfg)?;
            println!("{summary}");
        }
        Command::Stats { common, variants } => {
            let cfg = common.resolve()?;
            let path = variants.unwrap_or_else(|| cfg.out_dir.join(pipeline::VARIANTS_FILE));
            let out = pipeline::cmd_stats(&cfg, &path)?;
            println!("n\tstrategy\tmean_normalized_dl\tcount");
            for r in &out.strategies {
                println!(
                    "{}\t{}\t{:.4}\t{}",
                    r.n, r.strategy, r.mean_normalized_dl, r.count
                );
            }
        }
        Command::Classify { common, variants } => {
            let cfg = common.resolve()?;
            let path = variants.unwrap_or_else(|| cfg.out_dir.join(pipeline::VARIANTS_FILE));
            let out = pipeline::cmd_classify(&cfg, &path)?;
            println!("model\tmean_accuracy");
            for m in &out.models {
                println!("{}\t{:.2}", m.name, m.cv.mean_accuracy);
            }
        }
        Command::Report(common) => {
            let cfg = common.resolve()?;
            print!("{}", pipeline::cmd_report(&cfg)?);
        }
    }
    Ok(())
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
