mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use facetrait::artifact::{load_model, save_model, ModelArtifact};
use facetrait::baseline::{LogRegConfig, Metric, Weighting};
use facetrait::bench::{rows_to_csv, run_suite, suite_by_name, verify_csv, SuiteOptions};
use facetrait::classifier::ModelConfig;
use facetrait::embedding::{load_aef, save_aef, EmbeddingDataset};
use facetrait::eval::{measure_latency, EvalReport};
use facetrait::extract::{
    extract_directory, ChannelOrder, Device, InferenceAdapter, PreprocessManifest, ResizeFilter,
    StubAdapter, TensorLayout, DEFAULT_BATCH,
};
use facetrait::mlp::MlpTrainConfig;
use facetrait::svm::{KernelKind, SmoParams};
use facetrait::synthetic::{train_validation, ClusterSpec};
use facetrait::trees::{BaggingParams, BoostParams, SubspaceParams, DEFAULT_LEARNERS};
use facetrait::{Error, Result};

#[derive(Parser)]
#[command(
    name = "facetrait",
    version,
    about = "Gender classification on face embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a folder-per-class image tree into an AEF file.
    Extract(ExtractArgs),
    /// Train one model on an AEF file and write an FTM1 model file.
    Train(TrainArgs),
    /// Evaluate a model file on an AEF file.
    Eval(EvalArgs),
    /// Run a benchmark suite and write a CSV of results.
    Bench(BenchArgs),
    /// Write synthetic two-cluster training and validation AEF files.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Rgb,
    Bgr,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Nchw,
    Nhwc,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    Bilinear,
    Nearest,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeviceArg {
    Cpu,
    Gpu,
}

#[derive(Args)]
struct ExtractArgs {
    /// Root directory holding female/ and male/ subdirectories.
    #[arg(long)]
    images: PathBuf,
    /// ONNX embedding model.
    #[arg(long, required_unless_present = "stub_adapter")]
    model: Option<PathBuf>,
    /// Use deterministic hash-based pseudo-embeddings instead of a model.
    #[arg(long, conflicts_with = "model")]
    stub_adapter: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BATCH)]
    batch: usize,
    #[arg(long, value_enum, default_value = "rgb")]
    channel_order: OrderArg,
    #[arg(long, value_enum, default_value = "nchw")]
    layout: LayoutArg,
    #[arg(long, value_enum, default_value = "bilinear")]
    resize: FilterArg,
    #[arg(long, default_value_t = 127.5)]
    scale_offset: f32,
    #[arg(long, default_value_t = 127.5)]
    scale_divisor: f32,
    #[arg(long, value_enum, default_value = "cpu")]
    device: DeviceArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Svm,
    Logreg,
    Lda,
    Knn,
    Mlp,
    NaiveBayes,
    Tree,
    BaggedTrees,
    BoostedTrees,
    RusboostedTrees,
    SubspaceDiscriminant,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Linear,
    Quadratic,
    Cubic,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    Cosine,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "FACETRAIT_SEED", default_value_t = 0)]
    seed: u64,
    /// SVM kernel.
    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: KernelArg,
    /// SVM box constraint.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Kernel scale; defaults to the square root of the dimension.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 10)]
    max_passes: usize,
    /// Kernel row cache budget in MiB.
    #[arg(long, default_value_t = 256)]
    cache_mb: usize,
    /// Train the SVM on a random subset of this many records.
    #[arg(long)]
    subsample: Option<usize>,
    /// L2 penalty for logistic regression.
    #[arg(long, default_value_t = facetrait::bench::LOGREG_LAMBDA)]
    lambda: f64,
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Weight KNN votes by inverse distance.
    #[arg(long)]
    weighted: bool,
    /// Hidden layer sizes, e.g. `10,10`.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = MlpTrainConfig::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = MlpTrainConfig::default().step_size)]
    step_size: f64,
    #[arg(long, default_value_t = MlpTrainConfig::default().batch_size)]
    batch_size: usize,
    /// Split budget for trees; ensembles use their own default when absent.
    #[arg(long)]
    max_splits: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_LEARNERS)]
    learners: usize,
    #[arg(long, default_value_t = facetrait::trees::DEFAULT_BOOST_LEARN_RATE)]
    learn_rate: f64,
    /// Features per subspace learner; defaults to half the dimension.
    #[arg(long)]
    subspace_dim: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Report JSON path; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    roc: Option<PathBuf>,
    #[arg(long)]
    roc_svg: Option<PathBuf>,
    /// Timed single predictions for the latency figures.
    #[arg(long, default_value_t = 200)]
    latency_reps: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "table1")]
    suite: String,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    validation: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "FACETRAIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Cap on the training records for the Gaussian/Quadratic/Cubic SVM rows; 0 disables.
    #[arg(long, default_value_t = facetrait::bench::DEFAULT_SVM_SUBSAMPLE)]
    svm_subsample: usize,
    #[arg(long, default_value_t = MlpTrainConfig::default().epochs)]
    mlp_epochs: usize,
    /// Number of suite entries run concurrently.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out_train: PathBuf,
    #[arg(long)]
    out_validation: PathBuf,
    #[arg(long, default_value_t = 4000)]
    n_train: usize,
    #[arg(long, default_value_t = 1000)]
    n_validation: usize,
    #[arg(long, default_value_t = facetrait::embedding::ARCFACE_DIM)]
    dim: usize,
    #[arg(long, env = "FACETRAIT_SEED", default_value_t = 0)]
    seed: u64,
}

fn load_adapter(args: &ExtractArgs) -> Result<Box<dyn InferenceAdapter>> {
    if args.stub_adapter {
        return Ok(Box::new(StubAdapter::new()));
    }
    let device = match args.device {
        DeviceArg::Cpu => Device::Cpu,
        DeviceArg::Gpu => Device::Gpu,
    };
    let path = args.model.as_deref().expect("clap enforces --model");
    onnx_adapter(path, device)
}

#[cfg(feature = "onnx")]
fn onnx_adapter(path: &Path, device: Device) -> Result<Box<dyn InferenceAdapter>> {
    if !path.exists() {
        return Err(Error::Extraction(format!(
            "model file {} not found",
            path.display()
        )));
    }
    Ok(Box::new(facetrait::extract::OnnxAdapter::load(
        path, device,
    )?))
}

#[cfg(not(feature = "onnx"))]
fn onnx_adapter(_: &Path, _: Device) -> Result<Box<dyn InferenceAdapter>> {
    Err(Error::Extraction(
        "built without ONNX support; rebuild with the `onnx` feature or use --stub-adapter".into(),
    ))
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let manifest = PreprocessManifest {
        channel_order: match args.channel_order {
            OrderArg::Rgb => ChannelOrder::Rgb,
            OrderArg::Bgr => ChannelOrder::Bgr,
        },
        layout: match args.layout {
            LayoutArg::Nchw => TensorLayout::ChannelsFirst,
            LayoutArg::Nhwc => TensorLayout::ChannelsLast,
        },
        resize_filter: match args.resize {
            FilterArg::Bilinear => ResizeFilter::Bilinear,
            FilterArg::Nearest => ResizeFilter::Nearest,
        },
        scale_offset: args.scale_offset,
        scale_divisor: args.scale_divisor,
        ..PreprocessManifest::default()
    };
    let adapter = load_adapter(&args)?;
    log::info!("adapter: {}", adapter.describe());
    let (dataset, summary) =
        extract_directory(adapter.as_ref(), &args.images, &manifest, args.batch)?;
    save_aef(&dataset, &args.out)?;
    let manifest_path = args.out.with_extension("manifest.json");
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(&manifest_path, manifest_json).map_err(|e| Error::Storage {
        path: manifest_path.clone(),
        source: e,
    })?;
    println!(
        "female {}  male {}  skipped {}  -> {} (dimension {})",
        summary.extracted[0],
        summary.extracted[1],
        summary.skipped,
        args.out.display(),
        dataset.dimension()
    );
    Ok(())
}

fn train_config(args: &TrainArgs, data: &EmbeddingDataset) -> ModelConfig {
    let boost = BoostParams {
        n_learners: args.learners,
        max_splits: args
            .max_splits
            .unwrap_or(facetrait::trees::DEFAULT_BOOST_MAX_SPLITS),
        learn_rate: args.learn_rate,
        seed: args.seed,
    };
    match args.algo {
        Algo::Svm => ModelConfig::Svm {
            kernel: match args.kernel {
                KernelArg::Linear => KernelKind::Linear,
                KernelArg::Quadratic => KernelKind::Polynomial { degree: 2 },
                KernelArg::Cubic => KernelKind::Polynomial { degree: 3 },
                KernelArg::Gaussian => KernelKind::Gaussian,
            },
            scale: args.sigma,
            smo: SmoParams {
                c: args.c,
                tol: args.tol,
                max_passes: args.max_passes,
                cache_bytes: args.cache_mb << 20,
                seed: args.seed,
                subsample: args.subsample,
            },
        },
        Algo::Logreg => ModelConfig::LogisticRegression {
            lambda: args.lambda,
            solver: LogRegConfig::default(),
        },
        Algo::Lda => ModelConfig::Lda,
        Algo::Knn => ModelConfig::Knn {
            k: args.k,
            metric: match args.metric {
                MetricArg::Euclidean => Metric::Euclidean,
                MetricArg::Cosine => Metric::Cosine,
            },
            weighting: if args.weighted {
                Weighting::InverseDistance
            } else {
                Weighting::Uniform
            },
        },
        Algo::Mlp => ModelConfig::Mlp {
            hidden: args.hidden.clone(),
            train: MlpTrainConfig {
                step_size: args.step_size,
                epochs: args.epochs,
                batch_size: args.batch_size,
                seed: args.seed,
                ..MlpTrainConfig::default()
            },
        },
        Algo::NaiveBayes => ModelConfig::NaiveBayes,
        Algo::Tree => ModelConfig::DecisionTree {
            max_splits: args.max_splits.unwrap_or(100),
        },
        Algo::BaggedTrees => ModelConfig::BaggedTrees(BaggingParams {
            n_learners: args.learners,
            max_splits: args
                .max_splits
                .unwrap_or(data.len().saturating_sub(1).max(1)),
            seed: args.seed,
            bootstrap: true,
        }),
        Algo::BoostedTrees => ModelConfig::AdaBoostTrees(boost),
        Algo::RusboostedTrees => ModelConfig::RusBoostTrees(boost),
        Algo::SubspaceDiscriminant => {
            let mut p = SubspaceParams::for_dimension(data.dimension());
            p.n_learners = args.learners;
            p.seed = args.seed;
            if let Some(m) = args.subspace_dim {
                p.subspace_dim = m;
            }
            ModelConfig::SubspaceDiscriminant(p)
        }
    }
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let data = load_aef(&args.data)?;
    let config = train_config(&args, &data);
    let start = Instant::now();
    let model = config.train(&data)?;
    let elapsed = start.elapsed().as_secs_f64();
    let predictions = model.predict_dataset(&data)?;
    let correct = predictions
        .iter()
        .zip(data.records())
        .filter(|(p, r)| p.label == r.label)
        .count();
    let artifact = ModelArtifact::new(config, model, &data)?;
    save_model(&args.out, &artifact)?;
    println!(
        "{}: training accuracy {:.4} ({}/{}), trained in {:.3}s -> {}",
        artifact.family(),
        correct as f64 / data.len() as f64,
        correct,
        data.len(),
        elapsed,
        args.out.display()
    );
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Storage {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let artifact = load_model(&args.model)?;
    let data = load_aef(&args.data)?;
    let model = &artifact.model;
    if model.dimension() != data.dimension() {
        return Err(Error::DimensionMismatch {
            expected: model.dimension(),
            actual: data.dimension(),
        });
    }
    let predictions = model.predict_dataset(&data)?;
    let predicted: Vec<_> = predictions.iter().map(|p| p.label).collect();
    let scores: Vec<f64> = predictions.iter().map(|p| p.score).collect();
    let inputs: Vec<Vec<f64>> = data
        .records()
        .iter()
        .take(100)
        .map(|r| r.features_f64())
        .collect();
    let latency = measure_latency(
        |x: &Vec<f64>| {
            let _ = model.predict(x);
        },
        &inputs,
        5,
        args.latency_reps,
    );
    let tag = format!("{} on {}", artifact.family(), data.source_tag);
    let report = EvalReport::build(&data.labels(), &predicted, &scores, latency, tag)?;
    match &args.out {
        Some(path) => write_text(path, &report.to_json())?,
        None => println!("{}", report.to_json()),
    }
    if let Some(path) = &args.roc {
        write_text(path, &report.roc_csv())?;
    }
    if let Some(path) = &args.roc_svg {
        write_text(path, &svg::roc_svg(&report.roc))?;
    }
    if args.out.is_some() {
        println!("{}", report.summary_line());
    } else {
        eprintln!("{}", report.summary_line());
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<bool> {
    let train = load_aef(&args.train)?;
    let validation = load_aef(&args.validation)?;
    let mut opts = SuiteOptions::for_training_set(&train, args.seed);
    opts.svm_subsample = (args.svm_subsample > 0).then_some(args.svm_subsample);
    opts.mlp_epochs = args.mlp_epochs;
    let entries = suite_by_name(&args.suite, &opts)?;
    let rows = run_suite(&entries, &train, &validation, args.parallel.max(1))?;
    let csv = rows_to_csv(&rows)?;
    verify_csv(&csv)?;
    write_text(&args.out, &csv)?;
    for row in &rows {
        match &row.outcome {
            Ok(r) => println!(
                "{:<20} {:<40} acc {:>6.2}%  F1 {:>6.2}%  train {:.2}s",
                row.model,
                row.settings,
                r.accuracy * 100.0,
                r.f_measure * 100.0,
                r.train_s
            ),
            Err(e) => eprintln!("{} / {}: {e}", row.model, row.settings),
        }
    }
    Ok(rows.iter().any(|r| r.succeeded()))
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let spec = ClusterSpec {
        dimension: args.dim,
        ..ClusterSpec::default()
    };
    let (train, validation) = train_validation(&spec, args.n_train, args.n_validation, args.seed)?;
    save_aef(&train, &args.out_train)?;
    save_aef(&validation, &args.out_validation)?;
    println!(
        "wrote {} training and {} validation records of dimension {}",
        train.len(),
        validation.len(),
        args.dim
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Extract(a) => cmd_extract(a).map(|_| true),
        Command::Train(a) => cmd_train(a).map(|_| true),
        Command::Eval(a) => cmd_eval(a).map(|_| true),
        Command::Bench(a) => cmd_bench(a),
        Command::Synth(a) => cmd_synth(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: every suite entry failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
