//! Experiment drivers behind the `mrf-crb` binary.
//!
//! Each mode turns an [`ExperimentConfig`] into CSV rows (schema
//! [`CSV_COLUMNS`]) plus a JSON report. Work items are dispatched to the
//! rayon pool and gathered back in grid order, so outputs do not depend on
//! scheduling.

mod runners;
mod table;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimators::Bandwidth;
use crate::lattice::Boundary;
use crate::model::{critical_theta, PottsModel};
use crate::samplers::{SamplerKind, RNG_ID};

pub use runners::{fit_log_log, run_experiment, LogLogFit};
pub use table::{write_csv, CsvRow, CSV_COLUMNS};

pub const TOOL_VERSION: &str = concat!("mrf-crb ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Estimate,
    Exact,
    Sweep,
    Scaling,
    Benchmark,
    Validate,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Estimate => "estimate",
            Mode::Exact => "exact",
            Mode::Sweep => "sweep",
            Mode::Scaling => "scaling",
            Mode::Benchmark => "benchmark",
            Mode::Validate => "validate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatticeSize {
    pub width: usize,
    pub height: usize,
}

impl FromStr for LatticeSize {
    type Err = Error;

    /// `WxH`, or a single `S` for a square lattice.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad lattice size `{s}`, expected WxH"));
        let (w, h) = match s.to_ascii_lowercase().split_once('x') {
            Some((w, h)) => (w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?),
            None => {
                let n = s.trim().parse().map_err(|_| bad())?;
                (n, n)
            }
        };
        if w == 0 || h == 0 {
            return Err(bad());
        }
        Ok(Self { width: w, height: h })
    }
}

/// Parses `a:b:n` (n evenly spaced points, inclusive) or a comma list.
pub fn parse_theta_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |t: &str| Error::Parse(format!("bad theta `{t}` in `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [a, b, n] => {
            let a: f64 = a.trim().parse().map_err(|_| bad(a))?;
            let b: f64 = b.trim().parse().map_err(|_| bad(b))?;
            let n: usize = n.trim().parse().map_err(|_| bad(n))?;
            match n {
                0 => return Err(Error::Parse(format!("empty theta grid `{s}`"))),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        [_] => s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad(t)))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Parse(format!("bad theta grid `{s}`"))),
    };
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Parse(format!("non-finite theta in `{s}`")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("theta grid `{s}` must be increasing")));
    }
    Ok(grid)
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkSettings {
    pub n_ml: usize,
    pub field_sweeps: usize,
    pub post_samples: usize,
    pub post_burn: usize,
    pub aux_moves: usize,
    pub proposal_sd: f64,
    pub bandwidth: Bandwidth,
    /// Upper end of the flat prior; `ln(1 + √K)` if unset.
    pub theta_max: Option<f64>,
}

impl Default for BenchmarkSettings {
    fn default() -> Self {
        Self {
            n_ml: 100,
            field_sweeps: 1000,
            post_samples: 1000,
            post_burn: 250,
            aux_moves: 10,
            proposal_sd: 0.05,
            bandwidth: Bandwidth::Auto,
            theta_max: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub num_labels: usize,
    pub size: LatticeSize,
    pub boundary: Boundary,
    /// Empty means "mode default": `ln(1 + √K)` for scaling, 0.1..1.5 otherwise.
    pub thetas: Vec<f64>,
    /// `None` means Swendsen-Wang for scaling and Gibbs elsewhere.
    pub sampler: Option<SamplerKind>,
    pub n_mc: usize,
    pub n_burn: usize,
    pub seed: u64,
    /// Independent chains per grid point.
    pub n_seeds: usize,
    pub sizes: Vec<LatticeSize>,
    pub label_counts: Vec<usize>,
    pub tolerance: f64,
    pub benchmark: BenchmarkSettings,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    #[serde(skip)]
    pub dump_chains: bool,
    #[serde(skip)]
    pub initial_field: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            num_labels: 2,
            size: LatticeSize { width: 32, height: 32 },
            boundary: Boundary::Toroidal,
            thetas: Vec::new(),
            sampler: None,
            n_mc: 100_000,
            n_burn: 1000,
            seed: 1,
            n_seeds: 1,
            sizes: vec![
                LatticeSize { width: 16, height: 16 },
                LatticeSize { width: 32, height: 32 },
                LatticeSize { width: 64, height: 64 },
            ],
            label_counts: vec![2, 3, 4],
            tolerance: 0.05,
            benchmark: BenchmarkSettings::default(),
            out_dir: None,
            dump_chains: false,
            initial_field: None,
        }
    }

    pub fn sampler(&self) -> SamplerKind {
        self.sampler.unwrap_or(match self.mode {
            Mode::Scaling => SamplerKind::SwendsenWang,
            _ => SamplerKind::GibbsSystematic,
        })
    }

    pub fn theta_grid(&self) -> Vec<f64> {
        if self.thetas.is_empty() {
            (1..=15).map(|i| i as f64 / 10.0).collect()
        } else {
            self.thetas.clone()
        }
    }

    /// θ used by the scaling study for `k` labels.
    pub fn scaling_theta(&self, k: usize) -> f64 {
        self.thetas.first().copied().unwrap_or_else(|| critical_theta(k))
    }

    pub fn model(&self) -> Result<PottsModel> {
        PottsModel::lattice(self.size.width, self.size.height, self.boundary, self.num_labels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_mc < 2 {
            return Err(Error::InsufficientSamples { got: self.n_mc, min: 2 });
        }
        if self.n_seeds == 0 {
            return Err(Error::InvalidParameter("need at least one seed".into()));
        }
        if self.mode == Mode::Benchmark && self.benchmark.n_ml < 2 {
            return Err(Error::InsufficientSamples {
                got: self.benchmark.n_ml,
                min: 2,
            });
        }
        if self.mode == Mode::Scaling && (self.sizes.is_empty() || self.label_counts.is_empty()) {
            return Err(Error::InvalidParameter("scaling needs sizes and label counts".into()));
        }
        if let Some(bad) = self.label_counts.iter().find(|&&k| k < 2) {
            return Err(Error::InvalidParameter(format!("label count {bad} < 2")));
        }
        if let Some(t) = self.theta_grid().iter().find(|t| **t < 0.0) {
            if self.sampler() == SamplerKind::SwendsenWang {
                return Err(Error::InvalidParameter(format!(
                    "Swendsen-Wang needs theta >= 0, got {t}"
                )));
            }
        }
        if self.mode != Mode::Scaling {
            self.model()?;
        }
        Ok(())
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("tool".into(), TOOL_VERSION.into()),
            ("rng".into(), RNG_ID.into()),
            ("master_seed".into(), self.seed.to_string()),
            (
                "config".into(),
                serde_json::to_string(self).expect("config serializes"),
            ),
        ]
    }
}

/// Rows plus the structured report of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<CsvRow>,
    /// One entry per chain or grid point.
    pub runs: Vec<Value>,
    /// Mode-specific verdicts: fits, pass/fail counts.
    pub summary: Value,
}

impl ExperimentOutput {
    pub fn report(&self, config: &ExperimentConfig) -> Value {
        json!({
            "tool": TOOL_VERSION,
            "rng": RNG_ID,
            "master_seed": config.seed,
            "config": config,
            "runs": self.runs,
            "summary": self.summary,
        })
    }

    pub fn write_csv<W: Write>(&self, config: &ExperimentConfig, out: W) -> Result<()> {
        write_csv(out, &config.metadata(), &self.rows)
    }

    /// Writes `<mode>.csv` and `<mode>.json` into `dir`.
    pub fn write_files(&self, config: &ExperimentConfig, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let csv = File::create(dir.join(format!("{}.csv", config.mode)))?;
        let mut csv = BufWriter::new(csv);
        self.write_csv(config, &mut csv)?;
        csv.flush()?;
        let json = File::create(dir.join(format!("{}.json", config.mode)))?;
        let mut json = BufWriter::new(json);
        serde_json::to_writer_pretty(&mut json, &self.report(config))
            .map_err(|e| Error::Io(e.into()))?;
        writeln!(json)?;
        json.flush()?;
        Ok(())
    }
}
