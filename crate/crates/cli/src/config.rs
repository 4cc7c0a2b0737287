//! Run configuration: global defaults from an optional JSON file, overridable
//! by command-line flags, hashed into every emitted artifact.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Effective configuration of a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: usize,
    pub out: Option<PathBuf>,
    /// The full command line after the binary name.
    pub argv: Vec<String>,
}

impl RunConfig {
    pub fn resolve(
        file: Option<FileConfig>,
        seed_flag: Option<u64>,
        threads_flag: Option<usize>,
        out_flag: Option<PathBuf>,
        argv: Vec<String>,
    ) -> Self {
        let file = file.unwrap_or_default();
        let env_threads = std::env::var("BLBESOV_THREADS")
            .ok()
            .and_then(|s| s.parse().ok());
        RunConfig {
            seed: seed_flag.or(file.seed).unwrap_or(0),
            threads: threads_flag
                .or(env_threads)
                .or(file.threads)
                .unwrap_or_else(num_cpus_fallback),
            out: out_flag.or(file.out),
            argv,
        }
    }

    /// Hash of the deterministic parts of the configuration. Thread count and
    /// output paths are execution details, not configuration identity:
    /// outputs are required to be identical at any thread count.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        let mut skip_next = false;
        for a in &self.argv {
            if skip_next {
                skip_next = false;
                continue;
            }
            if matches!(a.as_str(), "--threads" | "--out" | "--csv" | "--config") {
                skip_next = true;
                continue;
            }
            hasher.update(a.as_bytes());
            hasher.update([0u8]);
        }
        hex::encode(&hasher.finalize()[..8])
    }
}

fn num_cpus_fallback() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
