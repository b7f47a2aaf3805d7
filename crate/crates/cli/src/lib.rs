//! Run, fit and summarize threshold experiments with reproducible output
//! directories: `record.csv`, `fit.json` and `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rcqec_analysis::config::ExperimentConfig;
use rcqec_analysis::{fit_with_errors, hashing_bound, run_experiment, ExperimentRecord, FitOptions, RunConfig, ScalingFit};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("RCQEC_VERSION");
pub const RECORD_FILE: &str = "record.csv";
pub const FIT_FILE: &str = "fit.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Replay information for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: RunConfig,
    pub files: Vec<String>,
    /// Why no fit was written, if none was.
    pub fit_skipped: Option<String>,
}

/// SHA-256 of the canonical JSON form of `cfg`.
pub fn config_hash(cfg: &RunConfig) -> Result<String> {
    let text = serde_json::to_string(cfg)?;
    let digest = Sha256::digest(text.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn temp_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!(".{name}.tmp"))
}

/// Writes every `(name, bytes)` pair into `dir`, each through a temporary
/// file and a rename. On failure the temporaries and any files already
/// renamed by this call are removed.
pub fn write_outputs(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let cleanup = |upto: usize, renamed: usize| {
        for (i, (name, _)) in files.iter().enumerate().take(upto) {
            let _ = fs::remove_file(temp_path(dir, name));
            if i < renamed {
                let _ = fs::remove_file(dir.join(name));
            }
        }
    };
    for (i, (name, bytes)) in files.iter().enumerate() {
        if let Err(e) = fs::write(temp_path(dir, name), bytes) {
            cleanup(i + 1, 0);
            return Err(e).with_context(|| format!("writing {name}"));
        }
    }
    for (i, (name, _)) in files.iter().enumerate() {
        if let Err(e) = fs::rename(temp_path(dir, name), dir.join(name)) {
            cleanup(files.len(), i);
            return Err(e).with_context(|| format!("renaming {name}"));
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn record_bytes(record: &ExperimentRecord) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    record.write_csv(&mut out)?;
    Ok(out)
}

/// Whether the record has enough sizes and error rates to fit.
fn fit_precondition(record: &ExperimentRecord) -> Option<String> {
    let sizes = record.sizes().len();
    let mut ps: Vec<f64> = record.points.iter().map(|p| p.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    if sizes < 2 {
        Some(format!("{sizes} distinct size(s); a fit needs two"))
    } else if ps.len() < 4 {
        Some(format!("{} error rate(s); a fit needs four", ps.len()))
    } else if record.num_batches() < 2 {
        Some("fewer than two jackknife batches".into())
    } else {
        None
    }
}

/// Outcome of [`run`].
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: ExperimentRecord,
    pub fit: Option<ScalingFit>,
    pub manifest: Manifest,
}

/// Runs `cfg` on `threads` workers and writes the output files to
/// `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path, threads: usize) -> Result<RunOutput> {
    cfg.validate()?;
    let hash = config_hash(cfg)?;
    let mut record = run_experiment(cfg, threads)?;
    record.config_hash = hash.clone();
    let skipped = fit_precondition(&record);
    let fit = match skipped {
        None => Some(fit_with_errors(&record, &cfg.fit)?),
        Some(_) => None,
    };
    let mut files = vec![(RECORD_FILE, record_bytes(&record)?)];
    if let Some(f) = &fit {
        files.push((FIT_FILE, to_json(f)?));
    }
    let manifest = Manifest {
        schema_version: rcqec_analysis::SCHEMA_VERSION,
        version: VERSION.to_string(),
        experiment: cfg.experiment.name().to_string(),
        seed: cfg.seed,
        config_hash: hash,
        config: cfg.clone(),
        files: files.iter().map(|(n, _)| n.to_string()).collect(),
        fit_skipped: skipped,
    };
    files.push((MANIFEST_FILE, to_json(&manifest)?));
    write_outputs(out_dir, &files)?;
    Ok(RunOutput { record, fit, manifest })
}

pub fn read_record(path: &Path) -> Result<ExperimentRecord> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(ExperimentRecord::read_csv(file)?)
}

/// Fits a stored record and writes `fit.json` to `out_dir`.
pub fn fit_record(record_path: &Path, options: &FitOptions, out_dir: &Path) -> Result<ScalingFit> {
    let record = read_record(record_path)?;
    if let Some(why) = fit_precondition(&record) {
        bail!("cannot fit {}: {why}", record_path.display());
    }
    let fit = fit_with_errors(&record, options)?;
    write_outputs(out_dir, &[(FIT_FILE, to_json(&fit)?)])?;
    Ok(fit)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub rate: f64,
    pub p_c: f64,
    pub sigma: f64,
    pub p_hashing: f64,
}

fn rate_of(cfg: &ExperimentConfig) -> f64 {
    match cfg {
        ExperimentConfig::CodeCapacity(c) => c.rate,
        ExperimentConfig::Entropy(c) => c.rate,
        ExperimentConfig::MutualInfo(c) => c.rate,
        ExperimentConfig::Spacetime(c) => c.rate,
    }
}

/// `(rate, p_c, σ, p_hashing)` for each run directory, sorted by rate.
/// Stored fits are used when present; otherwise the record is fitted with
/// the run's own options.
pub fn threshold_summary(run_dirs: &[PathBuf]) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for dir in run_dirs {
        let manifest: Manifest = serde_json::from_slice(
            &fs::read(dir.join(MANIFEST_FILE)).with_context(|| format!("reading manifest in {}", dir.display()))?,
        )?;
        let fit_path = dir.join(FIT_FILE);
        let fit: ScalingFit = if fit_path.exists() {
            serde_json::from_slice(&fs::read(&fit_path)?)?
        } else {
            let record = read_record(&dir.join(RECORD_FILE))?;
            if let Some(why) = fit_precondition(&record) {
                bail!("cannot fit {}: {why}", dir.display());
            }
            fit_with_errors(&record, &manifest.config.fit)?
        };
        let rate = rate_of(&manifest.config.experiment);
        rows.push(SummaryRow {
            rate,
            p_c: fit.p_c,
            sigma: fit.sigma_p_c.unwrap_or(f64::NAN),
            p_hashing: hashing_bound(rate)?,
        });
    }
    rows.sort_by(|a, b| a.rate.total_cmp(&b.rate));
    Ok(rows)
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("rate,p_c,sigma,p_hashing\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.rate, r.p_c, r.sigma, r.p_hashing));
    }
    out
}
