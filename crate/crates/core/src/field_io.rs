//! Plain-text field files.
//!
//! ```text
//! K W H BOUNDARY
//! l l l ...      (H rows of W labels, 1-based)
//! ```

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::lattice::Boundary;
use crate::model::{Configuration, ExponentialFamily, PottsModel};

pub fn write_configuration<W: Write>(
    model: &PottsModel,
    config: &Configuration,
    mut out: W,
) -> Result<()> {
    model.validate(config)?;
    let g = model.graph();
    writeln!(
        out,
        "{} {} {} {}",
        model.num_labels(),
        g.width(),
        g.height(),
        g.boundary()
    )?;
    for row in config.labels().chunks(g.width()) {
        let line: Vec<String> = row.iter().map(|l| (l + 1).to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_configuration<R: BufRead>(input: R) -> Result<(PottsModel, Configuration)> {
    let mut lines = input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty field file".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::Parse(format!(
            "header must be `K W H BOUNDARY`, got `{header}`"
        )));
    }
    let parse_usize = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
    };
    let k = parse_usize(fields[0], "K")?;
    let width = parse_usize(fields[1], "width")?;
    let height = parse_usize(fields[2], "height")?;
    let boundary: Boundary = fields[3].parse()?;
    let model = PottsModel::lattice(width, height, boundary, k)?;

    let mut labels = Vec::with_capacity(width * height);
    for (row, line) in lines.enumerate() {
        let line = line?;
        let before = labels.len();
        for tok in line.split_whitespace() {
            let l: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad label `{tok}` on row {}", row + 1)))?;
            if l == 0 || l > k {
                return Err(Error::Parse(format!(
                    "label {l} on row {} outside 1..={k}",
                    row + 1
                )));
            }
            labels.push((l - 1) as u16);
        }
        if labels.len() - before != width {
            return Err(Error::Parse(format!(
                "row {} has {} labels, expected {width}",
                row + 1,
                labels.len() - before
            )));
        }
    }
    if labels.len() != width * height {
        return Err(Error::Parse(format!(
            "expected {height} rows, got {}",
            labels.len() / width
        )));
    }
    Ok((model, Configuration::new(labels)))
}
