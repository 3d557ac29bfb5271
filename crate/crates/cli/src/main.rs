use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fusemt::eval::synthetic::{split_dataset, synthetic_dataset, FluencyShape, SyntheticSpec};
use fusemt::eval::{
    dataset_to_tsv, evaluate, load_dataset, load_scores, run_pipeline, AnnotatedDataset, Dimension, EvalError,
    PipelineConfig, ProviderConfig, EXIT_USAGE,
};
use fusemt::metrics::{format_scores, train_approach, Approach, Baseline, Scorer, TrainParams};
use fusemt::mlcore::{load_model, save_model, FEATURE_NAMES};
use fusemt::phonetics::PhoneticScheme;
use fusemt::semantics::EmbeddingProvider;

#[derive(Parser)]
#[command(name = "fusemt", version, about = "Feature-union MT evaluation metrics and correlation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump lexical, phonetic, semantic and fuzzy features as TSV.
    Features {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "soundex+metaphone")]
        scheme: PhoneticScheme,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train approach 4, 5 or 6 on an annotated dev set.
    Train {
        #[arg(long, value_parser = trained_approach)]
        approach: Approach,
        #[arg(long)]
        dev: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Language tag stored in the model.
        #[arg(long, default_value = "und")]
        language: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Trees in the random forest or boosting ensemble.
        #[arg(long)]
        trees: Option<usize>,
        #[command(flatten)]
        provider: ProviderArgs,
    },
    /// Score every pair of a dataset with one approach.
    Score {
        #[arg(long)]
        approach: Approach,
        #[arg(long)]
        data: PathBuf,
        /// Trained model, required for approaches 4 to 6.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score every pair of a dataset with BLEU, chrF or chrF++.
    Baseline {
        #[arg(long)]
        metric: Baseline,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlate a score file with the human annotations of a dataset.
    Evaluate {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "overall")]
        dimension: Dimension,
    },
    /// Run the configured approaches and baselines end to end.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a seeded synthetic dev/test dataset pair.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value = "synthetic")]
        language: String,
        #[arg(long, default_value_t = 300)]
        rows: usize,
        #[arg(long, default_value_t = 100)]
        dev_rows: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        noise: f64,
        /// Make fluency a non-linear function of the features.
        #[arg(long)]
        nonlinear: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Hashed,
    Store,
    Remote,
}

#[derive(Args)]
struct ProviderArgs {
    /// Embedding source.
    #[arg(long, value_enum, default_value = "hashed")]
    provider: Backend,
    /// Embedding store file (store backend).
    #[arg(long)]
    store: Option<PathBuf>,
    /// Encoder URL (remote backend).
    #[arg(long)]
    endpoint: Option<String>,
    /// Dimension of hashed n-gram embeddings.
    #[arg(long, default_value_t = 512)]
    hashed_dim: usize,
}

enum Failure {
    Usage(String),
    Eval(EvalError),
}

impl<E: Into<EvalError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Eval(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn trained_approach(s: &str) -> Result<Approach, String> {
    let a: Approach = s.parse()?;
    if a.is_trained() {
        Ok(a)
    } else {
        Err(format!("approach {a} has fixed weights; only 4, 5 and 6 are trained"))
    }
}

impl ProviderArgs {
    fn build(&self) -> Result<EmbeddingProvider, Failure> {
        let config = match self.provider {
            Backend::Hashed => ProviderConfig::Hashed {
                dim: self.hashed_dim,
                n: 3,
            },
            Backend::Store => ProviderConfig::Store {
                path: self
                    .store
                    .clone()
                    .ok_or_else(|| Failure::Usage("--provider store needs --store <path>".into()))?,
            },
            Backend::Remote => ProviderConfig::Remote {
                endpoint: self
                    .endpoint
                    .clone()
                    .ok_or_else(|| Failure::Usage("--provider remote needs --endpoint <url>".into()))?,
                timeout_secs: 30,
                retries: 2,
                batch_size: 64,
            },
        };
        Ok(config.build(Path::new(""))?)
    }
}

fn emit(out: Option<&Path>, content: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, content).map_err(|source| EvalError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth an error exit
            let _ = stdout.write_all(content.as_bytes());
        }
    }
    Ok(())
}

fn load(path: &Path) -> Result<AnnotatedDataset, EvalError> {
    let language = path
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.split('.').next())
        .unwrap_or("und");
    load_dataset(path, language, None)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Features {
            data,
            scheme,
            provider,
            out,
        } => {
            let data = load(&data)?;
            let provider = provider.build()?;
            let features = fusemt::metrics::extract_batch(&data.pairs(), &provider, scheme)?;
            let mut text = format!("id\t{}\n", FEATURE_NAMES.join("\t"));
            for (id, f) in data.ids().zip(features) {
                let [l, p, s, z] = f.to_array();
                text.push_str(&format!("{id}\t{l}\t{p}\t{s}\t{z}\n"));
            }
            emit(out.as_deref(), &text)
        }
        Command::Train {
            approach,
            dev,
            out,
            language,
            lambda,
            seed,
            trees,
            provider,
        } => {
            let data = load(&dev)?;
            let provider = provider.build()?;
            let (sem, flu) = data.training_targets()?;
            let mut params = TrainParams {
                ridge_lambda: lambda,
                seed,
                ..TrainParams::default()
            };
            if let Some(n) = trees {
                params.random_forest.n_trees = n;
                params.gradient_boosting.n_trees = n;
            }
            let model = train_approach(approach, &data.pairs(), &sem, &flu, &provider, &params, &language)?;
            save_model(&model, &out)?;
            log::info!("wrote approach {approach} model to {}", out.display());
            Ok(())
        }
        Command::Score {
            approach,
            data,
            model,
            provider,
            out,
        } => {
            let data = load(&data)?;
            let provider = provider.build()?;
            let scorer = if approach.is_trained() {
                let path = model.ok_or_else(|| Failure::Usage(format!("approach {approach} needs --model <path>")))?;
                let model = load_model(&path)?;
                if model.approach != approach.id() {
                    return Err(Failure::Usage(format!(
                        "{} holds an approach {} model, not approach {approach}",
                        path.display(),
                        model.approach
                    )));
                }
                if model.source_tag != provider.source_tag() {
                    log::warn!(
                        "model was trained with embeddings from `{}` but scoring uses `{}`",
                        model.source_tag,
                        provider.source_tag()
                    );
                }
                Scorer::Trained(model)
            } else {
                Scorer::fixed(approach)?
            };
            let scores = scorer.score_batch(&data.pairs(), &provider)?;
            emit(out.as_deref(), &format_scores(data.ids().zip(scores)))
        }
        Command::Baseline { metric, data, out } => {
            let data = load(&data)?;
            let scores = metric.score_batch(&data.pairs());
            emit(out.as_deref(), &format_scores(data.ids().zip(scores)))
        }
        Command::Evaluate {
            scores,
            data,
            dimension,
        } => {
            let predictions = load_scores(&scores)?;
            let data = load(&data)?;
            let c = evaluate(&predictions, &data, dimension)?;
            emit(
                None,
                &format!("dimension\tn\tspearman\tpearson\n{dimension}\t{}\t{:.4}\t{:.4}\n", c.n, c.spearman, c.pearson),
            )
        }
        Command::Pipeline { config } => {
            let config = PipelineConfig::load(&config)?;
            let outcome = run_pipeline(&config)?;
            for w in &outcome.warnings {
                log::warn!("{w}");
            }
            emit(None, &outcome.table)
        }
        Command::Synth {
            out_dir,
            language,
            rows,
            dev_rows,
            seed,
            noise,
            nonlinear,
        } => {
            if dev_rows > rows {
                return Err(Failure::Usage(format!("--dev-rows {dev_rows} exceeds --rows {rows}")));
            }
            let spec = SyntheticSpec {
                rows,
                seed,
                noise_sd: noise,
                fluency: if nonlinear {
                    FluencyShape::Parabolic
                } else {
                    FluencyShape::Linear
                },
            };
            let provider = EmbeddingProvider::hashed(512, 3).map_err(EvalError::from)?;
            let (dev, test) = split_dataset(synthetic_dataset(&spec, &provider, &language)?, dev_rows);
            let io = |path: &Path| {
                let shown = path.display().to_string();
                move |source| EvalError::Io { path: shown, source }
            };
            fs::create_dir_all(&out_dir).map_err(io(&out_dir))?;
            for (split, set) in [("dev", &dev), ("test", &test)] {
                let path = out_dir.join(format!("{language}.{split}.tsv"));
                fs::write(&path, dataset_to_tsv(set)).map_err(io(&path))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE as u8)
        }
        Err(Failure::Eval(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
