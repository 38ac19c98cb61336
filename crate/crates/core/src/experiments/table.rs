use std::io::Write;

use crate::error::Result;

/// Column order of every CSV written by the experiments.
pub const CSV_COLUMNS: [&str; 21] = [
    "mode", "K", "width", "height", "boundary", "theta", "sampler", "n_mc", "n_burn", "seed",
    "fim", "fim_se", "crb", "ess", "exact_fim", "exact_crb", "rel_err", "emp_var", "emp_bias",
    "n_ml", "elapsed_s",
];

/// One output row; `None` renders as an empty cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvRow {
    pub mode: String,
    pub k: usize,
    pub width: usize,
    pub height: usize,
    pub boundary: String,
    pub theta: f64,
    pub sampler: Option<String>,
    pub n_mc: Option<u64>,
    pub n_burn: Option<u64>,
    pub seed: Option<u64>,
    pub fim: Option<f64>,
    pub fim_se: Option<f64>,
    pub crb: Option<f64>,
    pub ess: Option<f64>,
    pub exact_fim: Option<f64>,
    pub exact_crb: Option<f64>,
    pub rel_err: Option<f64>,
    pub emp_var: Option<f64>,
    pub emp_bias: Option<f64>,
    pub n_ml: Option<u64>,
    pub elapsed_s: Option<f64>,
}

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl CsvRow {
    pub fn cells(&self) -> Vec<String> {
        vec![
            self.mode.clone(),
            self.k.to_string(),
            self.width.to_string(),
            self.height.to_string(),
            self.boundary.clone(),
            self.theta.to_string(),
            cell(&self.sampler),
            cell(&self.n_mc),
            cell(&self.n_burn),
            cell(&self.seed),
            cell(&self.fim),
            cell(&self.fim_se),
            cell(&self.crb),
            cell(&self.ess),
            cell(&self.exact_fim),
            cell(&self.exact_crb),
            cell(&self.rel_err),
            cell(&self.emp_var),
            cell(&self.emp_bias),
            cell(&self.n_ml),
            self.elapsed_s.map(|e| format!("{e:.3}")).unwrap_or_default(),
        ]
    }
}

/// Writes `# key=value` metadata lines, the header and the rows.
pub fn write_csv<W: Write>(mut out: W, metadata: &[(String, String)], rows: &[CsvRow]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.cells().join(","))?;
    }
    Ok(())
}
