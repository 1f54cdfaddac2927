//! Run metadata and flat-file persistence: one directory per run with
//! meta.json, report.json and plot-ready CSV files.
//!
//! Timestamps live only in meta.json and are excluded from the config
//! digest, so determinism checks can compare payloads byte for byte.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::amp::IterationTrace;
use crate::error::Result;
use crate::experiments::{ConcentrationRecord, PathRecord, StabilityRecord};
use crate::oracle::{ChaosReport, OgpReport};
use crate::rng::GENERATOR_ID;
use crate::tensor::Provenance;

/// Identity block embedded in every output file set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub master_seed: u64,
    pub generator_id: String,
    pub build_version: String,
    pub timestamp: String,
    pub config_digest: String,
}

impl RunMetadata {
    pub fn new(master_seed: u64, config_json: &str) -> Self {
        RunMetadata {
            master_seed,
            generator_id: GENERATOR_ID.to_string(),
            build_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            config_digest: config_digest(config_json),
        }
    }
}

/// SHA-256 hex digest of the canonical config JSON (no timestamp inside).
pub fn config_digest(config_json: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config_json.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Output directory for one run.
pub struct RunDir {
    dir: PathBuf,
}

impl RunDir {
    pub fn create(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(RunDir {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write_meta(&self, meta: &RunMetadata) -> Result<()> {
        self.write_json("meta.json", meta)
    }

    pub fn write_json<S: Serialize>(&self, name: &str, value: &S) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(
        &self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = String>,
    ) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{row}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Serializable view of a trace: per-step norms always, full vectors on
/// request, plus how far V sits from the binary cube.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceSummary {
    pub schedule_name: String,
    pub tensor_provenance: Option<Provenance>,
    pub step_norms: Vec<f64>,
    pub v: Vec<f64>,
    pub v_distance_to_binary: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_steps: Option<Vec<Vec<f64>>>,
}

impl TraceSummary {
    pub fn from_trace(trace: &IterationTrace<f64>, include_vectors: bool) -> Self {
        TraceSummary {
            schedule_name: trace.schedule_name.clone(),
            tensor_provenance: trace.tensor_provenance.clone(),
            step_norms: trace.step_norms.clone(),
            v: trace.v.clone(),
            v_distance_to_binary: trace.v_distance_to_binary(),
            u_steps: include_vectors.then(|| trace.u_steps.clone()),
        }
    }
}

pub const TRACE_CSV_HEADER: &str = "step,norm,min,max";

pub fn trace_csv_rows(trace: &IterationTrace<f64>) -> Vec<String> {
    trace
        .u_steps
        .iter()
        .enumerate()
        .map(|(t, u)| {
            let min = u.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let max = u.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            format!("{t},{},{min},{max}", trace.step_norms[t])
        })
        .collect()
}

pub const RESIDUAL_CSV_HEADER: &str = "step,residual_norm";

pub fn residual_csv_rows(norms: &[f64]) -> Vec<String> {
    norms
        .iter()
        .enumerate()
        .map(|(t, r)| format!("{t},{r}"))
        .collect()
}

pub const ROUNDING_CSV_HEADER: &str = "j,multiplier,delta";

pub fn rounding_csv_rows(result: &crate::amp::RoundingResult<f64>) -> Vec<String> {
    result
        .step_multipliers
        .iter()
        .zip(result.distinct_index_deltas.iter())
        .enumerate()
        .map(|(j, (m, d))| format!("{j},{m},{d}"))
        .collect()
}

pub const STABILITY_CSV_HEADER: &str = "pair,t,beta_N_t,v_dev_t,op_dist,bound,K";

pub fn stability_csv_rows(records: &[StabilityRecord]) -> Vec<String> {
    records
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.pair, r.t, r.beta_n_t, r.v_dev_t, r.op_dist, r.bound, r.k
            )
        })
        .collect()
}

pub const PATH_CSV_HEADER: &str = "n,tau,overlap,energy,jump";

pub fn path_csv_rows(records: &[PathRecord]) -> Vec<String> {
    records
        .iter()
        .map(|r| format!("{},{},{},{},{}", r.n, r.tau_n, r.overlap_n, r.energy_n, r.jump_n))
        .collect()
}

pub const CONCENTRATION_CSV_HEADER: &str = "replica,value";

pub fn concentration_csv_rows(record: &ConcentrationRecord) -> Vec<String> {
    record
        .values
        .iter()
        .enumerate()
        .map(|(r, v)| format!("{r},{v}"))
        .collect()
}

pub const OVERLAP_CSV_HEADER: &str = "tau_i,tau_j,energy_i,energy_j,overlap";

pub fn overlap_csv_rows(report: &OgpReport) -> Vec<String> {
    report
        .pairs
        .iter()
        .map(|p| {
            format!(
                "{},{},{},{},{}",
                p.tau_i, p.tau_j, p.energy_i, p.energy_j, p.overlap
            )
        })
        .collect()
}

pub const CHAOS_CSV_HEADER: &str = "pair,overlap";

pub fn chaos_csv_rows(report: &ChaosReport) -> Vec<String> {
    report
        .overlaps
        .iter()
        .enumerate()
        .map(|(k, v)| format!("{k},{v}"))
        .collect()
}
