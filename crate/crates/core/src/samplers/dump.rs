//! Chain-dump files for offline reanalysis: `# key=value` header lines
//! followed by one whitespace-separated `u^(t)` row per recorded sample.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

use super::ChainOutput;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainDump {
    pub header: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl ChainDump {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn write_chain_dump<W: Write>(
    mut out: W,
    model: &str,
    theta: &[f64],
    chain: &ChainOutput,
) -> Result<()> {
    let theta: Vec<String> = theta.iter().map(|t| format!("{t}")).collect();
    writeln!(out, "# model={model}")?;
    writeln!(out, "# theta={}", theta.join(","))?;
    writeln!(out, "# seed={}", chain.seed)?;
    writeln!(out, "# sampler={}", chain.sampler)?;
    writeln!(out, "# n_burn={}", chain.n_burn)?;
    writeln!(out, "# n_mc={}", chain.n_mc())?;
    for u in chain.samples() {
        let row: Vec<String> = u.iter().map(|x| format!("{x}")).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_chain_dump<R: BufRead>(input: R) -> Result<ChainDump> {
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.trim().split_once('=') {
                header.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad value `{t}`", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} values, got {}",
                    i + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    Ok(ChainDump { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use crate::model::{ExponentialFamily, PottsModel};
    use crate::samplers::{run_chain, ChainSpec, SamplerKind};

    #[test]
    fn dump_round_trip() {
        let m = PottsModel::lattice(3, 3, Boundary::Toroidal, 3).unwrap();
        let spec = ChainSpec::new(SamplerKind::GibbsSystematic, 5, 50, 4);
        let chain = run_chain(&m, &[0.4], &spec, |_| {}).unwrap();
        let mut buf = Vec::new();
        write_chain_dump(&mut buf, &m.describe(), &[0.4], &chain).unwrap();
        let dump = read_chain_dump(buf.as_slice()).unwrap();
        assert_eq!(dump.get("seed"), Some("4"));
        assert_eq!(dump.get("sampler"), Some("gibbs"));
        assert_eq!(dump.get("theta"), Some("0.4"));
        assert_eq!(dump.rows.len(), 50);
        for (t, row) in dump.rows.iter().enumerate() {
            assert_eq!(row.as_slice(), chain.sample(t));
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(read_chain_dump("1 2\n3\n".as_bytes()).is_err());
        assert!(read_chain_dump("1 x\n".as_bytes()).is_err());
    }
}
