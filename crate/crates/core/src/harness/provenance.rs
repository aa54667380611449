//! Comment header written atop every CSV artifact.

use std::io::{self, Write};

use chrono::{DateTime, SecondsFormat, Utc};

use crate::harness::config::RunConfig;
use crate::protocols::measurement::RNG_NAME;

pub const FRAME_NOTE: &str =
    "interaction frame rotating at w_s (axial) and w_s/2 (radial); frequencies reported as w/2pi in Hz";

#[derive(Debug, Clone, PartialEq)]
pub struct ProvenanceHeader {
    pub config_hash: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub rng: String,
    pub timestamp: String,
    pub truncation: (usize, usize),
    pub frame: String,
}

/// `SOURCE_DATE_EPOCH` pins the timestamp when set.
pub fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    now.to_rfc3339_opts(SecondsFormat::Secs, true)
}

impl ProvenanceHeader {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            config_hash: cfg.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: cfg.experiment.name().to_string(),
            seed: cfg.measurement.seed,
            rng: RNG_NAME.to_string(),
            timestamp: timestamp(),
            truncation: (cfg.simulation.radial_dim, cfg.simulation.axial_dim),
            frame: FRAME_NOTE.to_string(),
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# config_hash: {}", self.config_hash)?;
        writeln!(w, "# tool: dpo-sim {}", self.version)?;
        writeln!(w, "# experiment: {}", self.experiment)?;
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# rng: {}", self.rng)?;
        writeln!(w, "# timestamp: {}", self.timestamp)?;
        writeln!(
            w,
            "# truncation: radial {} x axial {}",
            self.truncation.0, self.truncation.1
        )?;
        writeln!(w, "# frame: {}", self.frame)
    }

    /// Reads back the hash from a CSV produced with this header.
    pub fn hash_of(csv: &str) -> Option<&str> {
        csv.lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix("# config_hash: "))
    }
}

/// The non-comment lines of a CSV text.
pub fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}
