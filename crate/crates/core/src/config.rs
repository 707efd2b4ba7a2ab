//! Run configuration: everything that determines a report, seed and
//! precision included.

use std::path::PathBuf;

use serde::Serialize;

use crate::berend::{BerendBounds, DEFAULT_COINCIDENCE_BOUND, DEFAULT_WORD_BOUND};
use crate::classifier::ClassifyOptions;
use crate::numeric::DEFAULT_PRECISION_BITS;
use crate::polynomials::DEFAULT_DIRECT_BOUND;
use crate::witness::DEFAULT_WITNESS_HORIZON;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    Classify {
        input: PathBuf,
        output: Option<PathBuf>,
        witness: bool,
    },
    BerendCheck {
        input: PathBuf,
        output: Option<PathBuf>,
    },
    ConstructExample {
        poly: String,
        unit_bound: i64,
        output: Option<PathBuf>,
        report: Option<PathBuf>,
    },
    Orbit {
        input: PathBuf,
        theta: String,
        mode: OrbitMode,
        csv: Option<PathBuf>,
        csv_steps: u64,
        output: Option<PathBuf>,
    },
    CookSearch {
        polys: PathBuf,
        n: u64,
        output: Option<PathBuf>,
    },
    BadlyApprox {
        sequence: String,
        n: usize,
        ratio: String,
        eps_target: Option<String>,
        output: Option<PathBuf>,
    },
    ReproducePaper {
        output: Option<PathBuf>,
    },
}

/// Named limits shared by the pipelines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub direct_bound: u32,
    pub word_bound: u32,
    pub coincidence_bound: u32,
    pub iters: u64,
    /// Box size for density diagnostics, `1/2^k`.
    pub eps: String,
    pub witness_horizon: usize,
    pub orbit_cap: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            direct_bound: DEFAULT_DIRECT_BOUND,
            word_bound: DEFAULT_WORD_BOUND,
            coincidence_bound: DEFAULT_COINCIDENCE_BOUND,
            iters: 100_000,
            eps: "1/32".into(),
            witness_horizon: DEFAULT_WITNESS_HORIZON,
            orbit_cap: 1 << 22,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub precision_bits: usize,
    pub bounds: Bounds,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            seed: 0,
            precision_bits: DEFAULT_PRECISION_BITS,
            bounds: Bounds::default(),
        }
    }

    pub fn berend_bounds(&self) -> BerendBounds {
        BerendBounds {
            direct_bound: self.bounds.direct_bound,
            word_bound: self.bounds.word_bound,
            coincidence_bound: self.bounds.coincidence_bound,
            precision_bits: self.precision_bits,
        }
    }

    pub fn classify_options(&self, witness: bool) -> ClassifyOptions {
        ClassifyOptions {
            direct_bound: self.bounds.direct_bound,
            word_bound: self.bounds.word_bound,
            coincidence_bound: self.bounds.coincidence_bound,
            witness,
            witness_horizon: self.bounds.witness_horizon,
            precision_bits: self.precision_bits,
        }
    }
}
