//! Primal/dual/error datasets and their on-disk layout.
//!
//! ```text
//! <out>/manifest.json
//! <out>/<id>/primal.mps
//! <out>/<id>/dual.mps
//! <out>/<id>/errors/<TYPE>.mps
//! <out>/<id>/errors/<TYPE>.json
//! ```
//!
//! `manifest.json` (schema `dualkit-dataset/1`) holds the config, then one
//! entry per sample in generation order:
//! `{id, source, primal_status, primal_value, flags, errors: [{error_type, location, seed, attempts}]}`,
//! and `skipped: [{path, reason}]` for imports that failed to load.
//! Each `errors/<TYPE>.json` is
//! `{primal, truth_dual, mutated_dual, error_type, location, seed, attempts}` with
//! the LPs in `dualkit-lp/1` form.
//!
//! The injection seed for sample `i` and error type at position `k` of the
//! configured list is `error_seed + 16 i + k`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::dual::{dualize_checked_with, DualizeError};
use crate::gen::{co, twod};
use crate::inject::{inject_with, ErrorType, InjectError, InjectionRecord};
use crate::io::{self, json::lp_to_value, mps::write_mps_named, MpsWriteError};
use crate::lp::LinearProgram;
use crate::metrics::MetricOptions;
use crate::simplex::{solve, SolveError, SolveStatus};

pub const MANIFEST_SCHEMA: &str = "dualkit-dataset/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SampleSource {
    TwoD,
    CoSmall,
    Imported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSample {
    pub id: String,
    pub source: SampleSource,
    pub primal: LinearProgram,
    pub dual: LinearProgram,
    pub erroneous_duals: Vec<InjectionRecord>,
    pub primal_status: SolveStatus,
    pub primal_value: Option<f64>,
    /// Notes such as `NO_TARGET:<TYPE>` or `STATUS:UNBOUNDED`.
    pub flags: Vec<String>,
}

fn yes() -> bool {
    true
}

fn per_family() -> usize {
    20
}

fn all_errors() -> Vec<ErrorType> {
    ErrorType::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default = "yes")]
    pub two_d: bool,
    #[serde(default = "per_family")]
    pub co_per_family: usize,
    #[serde(default)]
    pub co_seed: u64,
    #[serde(default = "all_errors")]
    pub error_types: Vec<ErrorType>,
    #[serde(default)]
    pub error_seed: u64,
    /// LP files to ingest as `IMPORTED` samples.
    #[serde(default)]
    pub imports: Vec<PathBuf>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            two_d: true,
            co_per_family: per_family(),
            co_seed: 0,
            error_types: all_errors(),
            error_seed: 0,
            imports: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: DatasetConfig,
    pub samples: Vec<DatasetSample>,
    pub skipped: Vec<Skipped>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{id}: {source}")]
    Dualize { id: String, source: DualizeError },
    #[error("{id}: {source}")]
    Inject { id: String, source: InjectError },
    #[error("{id}: {source}")]
    Solve { id: String, source: SolveError },
    #[error("{id}: generated primal is {status}, expected OPTIMAL")]
    NotOptimal { id: String, status: SolveStatus },
    #[error("{path}: output directory exists and is not empty")]
    OutputNotEmpty { path: PathBuf },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{id}: {source}")]
    Write { id: String, source: MpsWriteError },
}

fn build_sample(
    id: String,
    source: SampleSource,
    primal: LinearProgram,
    index: usize,
    config: &DatasetConfig,
    opts: &MetricOptions,
) -> Result<DatasetSample, DatasetError> {
    let solved = solve(&primal).map_err(|source| DatasetError::Solve {
        id: id.clone(),
        source,
    })?;
    let mut flags = Vec::new();
    if solved.status != SolveStatus::Optimal {
        if source != SampleSource::Imported {
            return Err(DatasetError::NotOptimal {
                id,
                status: solved.status,
            });
        }
        flags.push(format!("STATUS:{}", solved.status));
    }
    let dual = dualize_checked_with(&primal, opts)
        .map_err(|source| DatasetError::Dualize {
            id: id.clone(),
            source,
        })?
        .dual;
    let mut erroneous_duals = Vec::new();
    if source != SampleSource::Imported {
        for (k, &etype) in config.error_types.iter().enumerate() {
            let seed = config
                .error_seed
                .wrapping_add(16 * index as u64)
                .wrapping_add(k as u64);
            match inject_with(&dual, etype, seed, opts) {
                Ok(record) => erroneous_duals.push(record),
                Err(InjectError::NoTarget(t)) => flags.push(format!("NO_TARGET:{t}")),
                Err(InjectError::AllNoOps(t)) => flags.push(format!("ALL_NO_OPS:{t}")),
                Err(source) => return Err(DatasetError::Inject { id, source }),
            }
        }
    }
    Ok(DatasetSample {
        id,
        source,
        primal,
        dual,
        erroneous_duals,
        primal_status: solved.status,
        primal_value: solved.value,
        flags,
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("lp")
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Loads LP files as `IMPORTED` samples with checked ground-truth duals.
/// Files that fail to load or dualize are listed in the second result.
pub fn ingest(paths: &[PathBuf], tag: &str) -> (Vec<DatasetSample>, Vec<Skipped>) {
    ingest_with(
        paths,
        tag,
        &DatasetConfig::default(),
        &MetricOptions::default(),
    )
}

fn ingest_with(
    paths: &[PathBuf],
    tag: &str,
    config: &DatasetConfig,
    opts: &MetricOptions,
) -> (Vec<DatasetSample>, Vec<Skipped>) {
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let lp = match io::read_lp(path, None) {
            Ok(lp) => lp,
            Err(e) => {
                skipped.push(Skipped {
                    path: path.clone(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let id = format!("{tag}_{i:03}_{}", stem(path));
        match build_sample(id, SampleSource::Imported, lp, i, config, opts) {
            Ok(s) => samples.push(s),
            Err(e) => skipped.push(Skipped {
                path: path.clone(),
                reason: e.to_string(),
            }),
        }
    }
    (samples, skipped)
}

pub fn gen_dataset(config: &DatasetConfig) -> Result<Dataset, DatasetError> {
    gen_dataset_with(config, &MetricOptions::default())
}

pub fn gen_dataset_with(
    config: &DatasetConfig,
    opts: &MetricOptions,
) -> Result<Dataset, DatasetError> {
    let mut sources: Vec<(String, SampleSource, LinearProgram)> = Vec::new();
    if config.two_d {
        sources.extend(
            twod::all_2d()
                .into_iter()
                .map(|(id, lp)| (id, SampleSource::TwoD, lp)),
        );
    }
    sources.extend(
        co::all_co(config.co_per_family, config.co_seed)
            .into_iter()
            .map(|(id, lp)| (id, SampleSource::CoSmall, lp)),
    );
    let mut samples = Vec::with_capacity(sources.len());
    for (index, (id, source, lp)) in sources.into_iter().enumerate() {
        samples.push(build_sample(id, source, lp, index, config, opts)?);
    }
    let (imported, skipped) = ingest_with(&config.imports, "imported", config, opts);
    samples.extend(imported);
    Ok(Dataset {
        config: config.clone(),
        samples,
        skipped,
    })
}

fn manifest(dataset: &Dataset) -> serde_json::Value {
    let samples: Vec<_> = dataset
        .samples
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "source": s.source,
                "primal_status": s.primal_status,
                "primal_value": s.primal_value,
                "flags": s.flags,
                "errors": s.erroneous_duals.iter().map(|r| json!({
                    "error_type": r.error,
                    "location": r.location,
                    "seed": r.seed,
                    "attempts": r.attempts,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let skipped: Vec<_> = dataset
        .skipped
        .iter()
        .map(|s| json!({"path": s.path, "reason": s.reason}))
        .collect();
    json!({
        "schema": MANIFEST_SCHEMA,
        "config": dataset.config,
        "samples": samples,
        "skipped": skipped,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn put(path: &Path, text: &str) -> Result<(), DatasetError> {
    fs::write(path, text).map_err(io_err(path))
}

fn write_tree(dataset: &Dataset, root: &Path) -> Result<(), DatasetError> {
    for s in &dataset.samples {
        let dir = root.join(&s.id);
        let errors = dir.join("errors");
        fs::create_dir_all(&errors).map_err(io_err(&errors))?;
        let mps = |lp: &LinearProgram| {
            write_mps_named(lp, &s.id).map_err(|source| DatasetError::Write {
                id: s.id.clone(),
                source,
            })
        };
        put(&dir.join("primal.mps"), &mps(&s.primal)?)?;
        put(&dir.join("dual.mps"), &mps(&s.dual)?)?;
        for r in &s.erroneous_duals {
            put(&errors.join(format!("{}.mps", r.error)), &mps(&r.mutated)?)?;
            let record = json!({
                "primal": lp_to_value(&s.primal),
                "truth_dual": lp_to_value(&s.dual),
                "mutated_dual": lp_to_value(&r.mutated),
                "error_type": r.error,
                "location": r.location,
                "seed": r.seed,
                "attempts": r.attempts,
            });
            let text =
                serde_json::to_string_pretty(&record).expect("records always serialize") + "\n";
            put(&errors.join(format!("{}.json", r.error)), &text)?;
        }
    }
    let text = serde_json::to_string_pretty(&manifest(dataset))
        .expect("manifest always serializes")
        + "\n";
    put(&root.join("manifest.json"), &text)
}

/// Writes the dataset under `out`, which must be absent or empty. The tree is
/// built in a sibling directory and renamed into place.
pub fn write_dataset(dataset: &Dataset, out: &Path) -> Result<(), DatasetError> {
    if out.exists() {
        let mut entries = fs::read_dir(out).map_err(io_err(out))?;
        if entries.next().is_some() {
            return Err(DatasetError::OutputNotEmpty {
                path: out.to_path_buf(),
            });
        }
    }
    let parent = out
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(io_err(parent))?;
    let name = out
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset");
    let tmp = parent.join(format!(".{name}.tmp{}", std::process::id()));
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(io_err(&tmp))?;
    }
    fs::create_dir(&tmp).map_err(io_err(&tmp))?;
    let result = write_tree(dataset, &tmp).and_then(|()| {
        if out.exists() {
            fs::remove_dir(out).map_err(io_err(out))?;
        }
        fs::rename(&tmp, out).map_err(io_err(out))
    });
    if result.is_err() {
        let _ = fs::remove_dir_all(&tmp);
    }
    result
}
