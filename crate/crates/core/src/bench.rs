//! The "table1" benchmark suite: 23 model configurations trained and scored
//! on a fixed train/validation pair.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{LogRegConfig, Metric, Weighting};
use crate::classifier::ModelConfig;
use crate::embedding::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::eval::{accuracy, confusion_from_predictions, f_measure, ConfusionCounts};
use crate::mlp::MlpTrainConfig;
use crate::rng::derive_seed;
use crate::svm::{KernelKind, SmoParams};
use crate::trees::{BaggingParams, BoostParams, SubspaceParams, DEFAULT_LEARNERS};

pub const SUITE_TABLE1: &str = "table1";
pub const CSV_HEADER: &str = "model,settings,tf,tm,ff,fm,accuracy_pct,f1_pct,train_s,eval_s";
pub const DEFAULT_SVM_SUBSAMPLE: usize = 8000;
pub const LOGREG_LAMBDA: f64 = 1e-4;
const ERROR_MARKER: &str = "ERROR";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub dimension: usize,
    pub n_train: usize,
    /// Cap on the training records seen by the nonlinear SVM rows.
    pub svm_subsample: Option<usize>,
    pub mlp_epochs: usize,
}

impl SuiteOptions {
    pub fn for_training_set(train: &EmbeddingDataset, seed: u64) -> Self {
        Self {
            seed,
            dimension: train.dimension(),
            n_train: train.len(),
            svm_subsample: Some(DEFAULT_SVM_SUBSAMPLE),
            mlp_epochs: MlpTrainConfig::default().epochs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub model: String,
    pub settings: String,
    pub config: ModelConfig,
}

/// The 23 rows of the reference results table, in table order.
pub fn table1_suite(opts: &SuiteOptions) -> Vec<SuiteEntry> {
    let seed = |i: u64| derive_seed(opts.seed, i);
    let mut entries = Vec::with_capacity(23);
    let mut push = |model: &str, settings: String, config: ModelConfig| {
        entries.push(SuiteEntry {
            model: model.to_string(),
            settings,
            config,
        })
    };

    for (i, (kernel, name)) in [
        (KernelKind::Gaussian, "Gaussian"),
        (KernelKind::Polynomial { degree: 2 }, "Quadratic"),
        (KernelKind::Polynomial { degree: 3 }, "Cubic"),
        (KernelKind::Linear, "Linear"),
    ]
    .into_iter()
    .enumerate()
    {
        let mut settings = format!("Kernel: {name}");
        let subsample = match (kernel, opts.svm_subsample) {
            (KernelKind::Linear, _) | (_, None) => None,
            (_, Some(n)) if opts.n_train > n => {
                settings.push_str(&format!(" [subsample {n}]"));
                Some(n)
            }
            _ => None,
        };
        push(
            "SVM",
            settings,
            ModelConfig::Svm {
                kernel,
                scale: None,
                smo: SmoParams {
                    seed: seed(i as u64),
                    subsample,
                    ..SmoParams::default()
                },
            },
        );
    }

    push(
        "Logistic Regression",
        "-".into(),
        ModelConfig::LogisticRegression {
            lambda: LOGREG_LAMBDA,
            solver: LogRegConfig::default(),
        },
    );
    push(
        "Linear Discriminant",
        "Covariance Structure: Full".into(),
        ModelConfig::Lda,
    );

    for (settings, k, metric, weighting) in [
        ("Cosine Distance K=1", 1, Metric::Cosine, Weighting::Uniform),
        (
            "Euc. Distance Weighted K=10",
            10,
            Metric::Euclidean,
            Weighting::InverseDistance,
        ),
        (
            "Euc. Distance K=10",
            10,
            Metric::Euclidean,
            Weighting::Uniform,
        ),
        (
            "Euc. Distance K=100",
            100,
            Metric::Euclidean,
            Weighting::Uniform,
        ),
    ] {
        push(
            "KNN",
            settings.into(),
            ModelConfig::Knn {
                k,
                metric,
                weighting,
            },
        );
    }

    for (i, (settings, hidden)) in [
        ("Hidden Layers: 1 Neurons: 1000", vec![1000]),
        ("Hidden Layers: 3 Neurons: {10,10,10}", vec![10, 10, 10]),
        ("Hidden Layers: 1 Neurons: 10", vec![10]),
        ("Hidden Layers: 2 Neurons: {10,10}", vec![10, 10]),
        ("Hidden Layers: 1 Neurons: 100", vec![100]),
    ]
    .into_iter()
    .enumerate()
    {
        push(
            "MLP",
            settings.into(),
            ModelConfig::Mlp {
                hidden,
                train: MlpTrainConfig {
                    epochs: opts.mlp_epochs,
                    seed: seed(10 + i as u64),
                    ..MlpTrainConfig::default()
                },
            },
        );
    }

    push(
        "Ensembles",
        "Subspace Discriminant".into(),
        ModelConfig::SubspaceDiscriminant(SubspaceParams {
            seed: seed(20),
            ..SubspaceParams::for_dimension(opts.dimension)
        }),
    );
    push(
        "Ensembles",
        "Bagged Trees".into(),
        ModelConfig::BaggedTrees(BaggingParams {
            n_learners: DEFAULT_LEARNERS,
            max_splits: opts.n_train.saturating_sub(1).max(1),
            seed: seed(21),
            bootstrap: true,
        }),
    );
    push(
        "Ensembles",
        "Boosted Trees".into(),
        ModelConfig::AdaBoostTrees(BoostParams {
            seed: seed(22),
            ..BoostParams::default()
        }),
    );
    push(
        "Ensembles",
        "RUSBoosted Trees".into(),
        ModelConfig::RusBoostTrees(BoostParams {
            seed: seed(23),
            ..BoostParams::default()
        }),
    );

    push("Naïve Bayes", "Gaussian".into(), ModelConfig::NaiveBayes);
    for max_splits in [100, 20, 4] {
        push(
            "Decision Tree",
            format!("Max # of Splits: {max_splits}"),
            ModelConfig::DecisionTree { max_splits },
        );
    }
    entries
}

pub fn suite_by_name(name: &str, opts: &SuiteOptions) -> Result<Vec<SuiteEntry>> {
    match name {
        SUITE_TABLE1 => Ok(table1_suite(opts)),
        other => Err(Error::Contract(format!(
            "unknown suite {other:?}; available: {SUITE_TABLE1}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowResult {
    pub counts: ConfusionCounts,
    pub accuracy: f64,
    pub f_measure: f64,
    pub train_s: f64,
    pub eval_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub model: String,
    pub settings: String,
    pub outcome: std::result::Result<RowResult, String>,
}

impl BenchRow {
    pub fn succeeded(&self) -> bool {
        self.outcome.is_ok()
    }
}

pub fn run_entry(
    entry: &SuiteEntry,
    train: &EmbeddingDataset,
    validation: &EmbeddingDataset,
) -> Result<RowResult> {
    let start = Instant::now();
    let model = entry.config.train(train)?;
    let train_s = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let predictions = model.predict_dataset(validation)?;
    let eval_s = start.elapsed().as_secs_f64();
    let predicted: Vec<_> = predictions.iter().map(|p| p.label).collect();
    let counts = confusion_from_predictions(&validation.labels(), &predicted)?;
    Ok(RowResult {
        counts,
        accuracy: accuracy(&counts)?,
        f_measure: f_measure(&counts),
        train_s,
        eval_s,
    })
}

/// Runs every entry, `parallel` at a time. Rows come back in suite order and
/// a failing entry only affects its own row.
pub fn run_suite(
    entries: &[SuiteEntry],
    train: &EmbeddingDataset,
    validation: &EmbeddingDataset,
    parallel: usize,
) -> Result<Vec<BenchRow>> {
    Error::check_dim(train.dimension(), validation.dimension())?;
    let run = |entry: &SuiteEntry| {
        let outcome = run_entry(entry, train, validation).map_err(|e| e.to_string());
        match &outcome {
            Ok(r) => log::info!(
                "{} / {}: accuracy {:.4} in {:.2}s",
                entry.model,
                entry.settings,
                r.accuracy,
                r.train_s
            ),
            Err(e) => log::warn!("{} / {} failed: {e}", entry.model, entry.settings),
        }
        BenchRow {
            model: entry.model.clone(),
            settings: entry.settings.clone(),
            outcome,
        }
    };
    if parallel <= 1 {
        return Ok(entries.iter().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .map_err(|e| Error::Contract(format!("cannot start {parallel} workers: {e}")))?;
    Ok(pool.install(|| entries.par_iter().map(run).collect()))
}

/// Bench CSV text. Failed rows carry `ERROR` in every numeric column.
pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
    for row in rows {
        let mut record = vec![row.model.clone(), row.settings.clone()];
        match &row.outcome {
            Ok(r) => {
                let c = &r.counts;
                record.extend([
                    c.true_females.to_string(),
                    c.true_males.to_string(),
                    c.false_females.to_string(),
                    c.false_males.to_string(),
                    (r.accuracy * 100.0).to_string(),
                    (r.f_measure * 100.0).to_string(),
                    format!("{:.3}", r.train_s),
                    format!("{:.3}", r.eval_s),
                ]);
            }
            Err(_) => record.extend(std::iter::repeat_n(ERROR_MARKER.to_string(), 8)),
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Re-derives accuracy and F-measure from each row's counts and checks that
/// the emitted values agree exactly. Returns the number of successful rows.
pub fn verify_csv(text: &str) -> Result<usize> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Format(e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Format(format!("unexpected header {header:?}")));
    }
    let mut ok = 0;
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            column: None,
            message: e.to_string(),
        })?;
        if &record[2] == ERROR_MARKER {
            continue;
        }
        let field = |col: usize| -> Result<f64> {
            record[col].parse::<f64>().map_err(|e| Error::Parse {
                line,
                column: Some(col + 1),
                message: e.to_string(),
            })
        };
        let count = |col: usize| -> Result<u64> {
            record[col].parse::<u64>().map_err(|e| Error::Parse {
                line,
                column: Some(col + 1),
                message: e.to_string(),
            })
        };
        let c = ConfusionCounts::new(count(2)?, count(3)?, count(4)?, count(5)?);
        let acc = accuracy(&c)? * 100.0;
        let f1 = f_measure(&c) * 100.0;
        if acc.to_bits() != field(6)?.to_bits() || f1.to_bits() != field(7)?.to_bits() {
            return Err(Error::Format(format!(
                "line {line}: accuracy/F1 columns disagree with the confusion counts"
            )));
        }
        ok += 1;
    }
    Ok(ok)
}
