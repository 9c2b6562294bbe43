//! CSV ingestion and preprocessing of real tabular datasets.
//!
//! Input files are plain comma-separated UTF-8 with a header row. One column
//! is the regression/classification target, one is the protected group
//! attribute; everything else (minus an explicit drop list) must parse as a
//! real-valued feature. Rows with blank cells are rejected and counted.
//!
//! Preprocessing appends seeded Gaussian noise columns, splits rows into
//! labeled / unlabeled / test by a seeded uniform subsample without
//! replacement, and standardizes features with statistics frozen on the
//! training portion. Constant columns are mapped to all-zeros (keeping the
//! dimension stable across seeds) and reported.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::ObjectiveDataset;
use crate::linalg::Mat;
use crate::rng::CounterRng;

/// Column mapping for a fairness CSV file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSchema {
    pub target_column: String,
    pub group_column: String,
    #[serde(default)]
    pub drop_columns: Vec<String>,
    /// Cell value (compared as a trimmed string) mapped to group +1;
    /// everything else maps to -1.
    pub positive_group_value: String,
}

impl CsvSchema {
    pub fn validate(&self) -> Result<()> {
        if self.target_column == self.group_column {
            return Err(Error::Config(
                "target and group columns must be distinct".into(),
            ));
        }
        Ok(())
    }
}

/// Parsed CSV contents: numeric features, target, group in {-1, +1}.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub feature_names: Vec<String>,
    pub features: Mat,
    pub target: Vec<f64>,
    pub group: Vec<f64>,
    /// Rows dropped because at least one needed cell was blank.
    pub rejected_rows: usize,
}

impl RawTable {
    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }
}

/// Load and parse a CSV file under the given schema.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<RawTable> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let col_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let target_idx = col_index(&schema.target_column)?;
    let group_idx = col_index(&schema.group_column)?;
    let mut drop_idx: Vec<usize> = vec![target_idx, group_idx];
    for name in &schema.drop_columns {
        drop_idx.push(col_index(name)?);
    }
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|i| !drop_idx.contains(i))
        .collect();
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| headers[i].clone()).collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut target = Vec::new();
    let mut group = Vec::new();
    let mut rejected = 0usize;
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        let cell = |i: usize| record.get(i).unwrap_or("").trim();
        let needed: Vec<usize> = feature_cols
            .iter()
            .copied()
            .chain([target_idx, group_idx])
            .collect();
        if needed.iter().any(|&i| cell(i).is_empty()) {
            rejected += 1;
            continue;
        }
        let parse = |i: usize| -> Result<f64> {
            cell(i).parse::<f64>().map_err(|_| Error::BadCell {
                row: row_no + 1,
                column: headers[i].clone(),
                value: cell(i).to_string(),
            })
        };
        let mut feats = Vec::with_capacity(feature_cols.len());
        for &i in &feature_cols {
            feats.push(parse(i)?);
        }
        rows.push(feats);
        target.push(parse(target_idx)?);
        group.push(if cell(group_idx) == schema.positive_group_value {
            1.0
        } else {
            -1.0
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyData("csv rows"));
    }
    Ok(RawTable {
        feature_names,
        features: Mat::from_rows(rows),
        target,
        group,
        rejected_rows: rejected,
    })
}

/// How to turn a raw table into train/test material.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessPlan {
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    #[serde(default)]
    pub noise_features: usize,
    #[serde(default = "default_true")]
    pub standardize: bool,
    /// Freeze standardization statistics on labeled rows only instead of
    /// labeled plus unlabeled.
    #[serde(default)]
    pub stats_from_labeled_only: bool,
    pub seed: u64,
}

fn default_true() -> bool {
    true
}

/// Held-out rows with labels and groups retained.
#[derive(Debug, Clone)]
pub struct TestTable {
    pub features: Mat,
    pub target: Vec<f64>,
    pub group: Vec<f64>,
}

/// Output of [`preprocess`].
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub train: ObjectiveDataset,
    pub test: TestTable,
    /// Indices of columns frozen to zero because they were constant on the
    /// training portion.
    pub constant_columns: Vec<usize>,
}

/// Split, augment with noise features and standardize a raw table.
pub fn preprocess(table: &RawTable, plan: &PreprocessPlan) -> Result<Preprocessed> {
    let rows = table.rows();
    if plan.n_labeled < 1 {
        return Err(Error::Config("n_labeled must be at least 1".into()));
    }
    if plan.n_labeled + plan.n_unlabeled > rows {
        return Err(Error::Config(format!(
            "labeled + unlabeled ({}) exceeds available rows ({rows})",
            plan.n_labeled + plan.n_unlabeled
        )));
    }
    let d_raw = table.dim();
    let d = d_raw + plan.noise_features;
    // Noise columns are generated for every row before any split, so they
    // are independent of the target by construction.
    let mut noise_rng = CounterRng::new(plan.seed, "noise-features");
    let mut full = Mat::zeros(rows, d);
    for i in 0..rows {
        for j in 0..d_raw {
            full.set(i, j, table.features.get(i, j));
        }
        for j in d_raw..d {
            full.set(i, j, noise_rng.normal());
        }
    }
    let mut split_rng = CounterRng::new(plan.seed, "subsample");
    let perm = split_rng.sample_indices(rows, rows);
    let labeled_idx = &perm[..plan.n_labeled];
    let unlabeled_idx = &perm[plan.n_labeled..plan.n_labeled + plan.n_unlabeled];
    let test_idx = &perm[plan.n_labeled + plan.n_unlabeled..];

    // Standardization statistics from the training portion.
    let stat_rows: Vec<usize> = if plan.stats_from_labeled_only {
        labeled_idx.to_vec()
    } else {
        labeled_idx.iter().chain(unlabeled_idx).copied().collect()
    };
    let mut mean = vec![0.0; d];
    let mut sd = vec![1.0; d];
    let mut constant_columns = Vec::new();
    if plan.standardize {
        let m = stat_rows.len() as f64;
        for j in 0..d {
            let mut s = 0.0;
            for &i in &stat_rows {
                s += full.get(i, j);
            }
            mean[j] = s / m;
            let mut v = 0.0;
            for &i in &stat_rows {
                let c = full.get(i, j) - mean[j];
                v += c * c;
            }
            let var = v / m;
            if var <= 1e-24 {
                constant_columns.push(j);
                sd[j] = 0.0;
            } else {
                sd[j] = var.sqrt();
            }
        }
        for i in 0..rows {
            for j in 0..d {
                let v = if sd[j] == 0.0 {
                    0.0
                } else {
                    (full.get(i, j) - mean[j]) / sd[j]
                };
                full.set(i, j, v);
            }
        }
    }

    let take = |idx: &[usize]| -> Mat {
        Mat::from_rows(idx.iter().map(|&i| full.row(i).to_vec()).collect())
    };
    let labeled_x = take(labeled_idx);
    let labeled_y: Vec<f64> = labeled_idx.iter().map(|&i| table.target[i]).collect();
    let unlabeled_x = if plan.n_unlabeled > 0 {
        take(unlabeled_idx)
    } else {
        Mat::zeros(0, d)
    };
    let group: Vec<f64> = labeled_idx
        .iter()
        .chain(unlabeled_idx)
        .map(|&i| table.group[i])
        .collect();
    let train = ObjectiveDataset::new(labeled_x, labeled_y, unlabeled_x, Some(group))?;
    let test = TestTable {
        features: if test_idx.is_empty() {
            Mat::zeros(0, d)
        } else {
            take(test_idx)
        },
        target: test_idx.iter().map(|&i| table.target[i]).collect(),
        group: test_idx.iter().map(|&i| table.group[i]).collect(),
    };
    Ok(Preprocessed {
        train,
        test,
        constant_columns,
    })
}

/// Which test metric a dataset reports on the risk axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskMetric {
    SquaredLoss,
    ErrorRate,
}

/// Built-in preprocessing configurations for the four fairness datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetPreset {
    Communities,
    Adult,
    Hsls,
    Enem,
}

impl DatasetPreset {
    /// Subsample sizes and noise-feature counts for each dataset.
    pub fn plan(&self, seed: u64) -> PreprocessPlan {
        let (n_labeled, n_unlabeled, noise_features) = match self {
            DatasetPreset::Communities => (150, 350, 0),
            DatasetPreset::Adult => (1000, 2000, 1000),
            DatasetPreset::Hsls => (1000, 4000, 0),
            DatasetPreset::Enem => (2000, 8000, 0),
        };
        PreprocessPlan {
            n_labeled,
            n_unlabeled,
            noise_features,
            standardize: true,
            stats_from_labeled_only: false,
            seed,
        }
    }

    /// Communities is a regression target; the other three are
    /// classification tasks reported as error rates.
    pub fn risk_metric(&self) -> RiskMetric {
        match self {
            DatasetPreset::Communities => RiskMetric::SquaredLoss,
            _ => RiskMetric::ErrorRate,
        }
    }
}
