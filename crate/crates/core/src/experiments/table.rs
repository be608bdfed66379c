use sha2::{Digest, Sha256};

use super::ExperimentConfig;
use crate::error::{Error, Result};

pub const CODE_VERSION: &str = concat!("ifest-core ", env!("CARGO_PKG_VERSION"));
const CONFIG_PREFIX: &str = "# config| ";

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Where a table came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub command: String,
    pub seed: u64,
    pub code_version: String,
    /// Canonical configuration text.
    pub config: String,
}

impl Provenance {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Provenance {
            command: command.into(),
            seed: config.seed,
            code_version: CODE_VERSION.into(),
            config: config.to_toml(),
        }
    }

    pub fn config_sha256(&self) -> String {
        sha256_hex(&self.config)
    }
}

/// Numeric results with a provenance block.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new(experiment: &str, columns: &[&str], provenance: Provenance) -> Self {
        ResultTable {
            experiment: experiment.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance,
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the schema"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    fn data_block(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// CSV with a `#` provenance header. Floats use the shortest
    /// representation that round-trips, so output is byte-stable.
    pub fn to_csv(&self) -> String {
        let data = self.data_block();
        let p = &self.provenance;
        let mut out = String::new();
        out.push_str(&format!("# experiment: {}\n", self.experiment));
        out.push_str(&format!("# command: {}\n", p.command));
        out.push_str(&format!("# seed: {}\n", p.seed));
        out.push_str(&format!("# code_version: {}\n", p.code_version));
        out.push_str(&format!("# config_sha256: {}\n", p.config_sha256()));
        out.push_str(&format!("# data_sha256: {}\n", sha256_hex(&data)));
        for line in p.config.lines() {
            out.push_str(CONFIG_PREFIX);
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&data);
        out
    }
}

/// Summary of a table whose hashes check out.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifiedTable {
    pub experiment: String,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
    pub rows: usize,
}

/// Re-hashes the embedded configuration and data block of a CSV produced by
/// [`ResultTable::to_csv`]. With `expected`, also checks that the table was
/// produced from that configuration.
pub fn verify_csv(text: &str, expected: Option<&ExperimentConfig>) -> Result<VerifiedTable> {
    let fail = |m: String| Err(Error::Provenance(m));
    let mut fields = std::collections::BTreeMap::new();
    let mut config = String::new();
    let mut data = String::new();
    for line in text.split_inclusive('\n') {
        if let Some(rest) = line.strip_prefix(CONFIG_PREFIX) {
            config.push_str(rest.trim_end_matches('\n'));
            config.push('\n');
        } else if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.trim_end().split_once(": ") {
                fields.insert(k.to_string(), v.to_string());
            }
        } else {
            data.push_str(line);
        }
    }
    let get = |k: &str| {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| Error::Provenance(format!("missing `{k}` header")))
    };
    let config_hash = get("config_sha256")?;
    if sha256_hex(&config) != config_hash {
        return fail("embedded configuration does not match config_sha256".into());
    }
    if sha256_hex(&data) != get("data_sha256")? {
        return fail("data rows do not match data_sha256".into());
    }
    let seed: u64 = get("seed")?
        .parse()
        .map_err(|_| Error::Provenance("seed is not an integer".into()))?;
    let embedded = ExperimentConfig::from_toml(&config)?;
    if embedded.seed != seed {
        return fail(format!(
            "header seed {seed} differs from configuration seed {}",
            embedded.seed
        ));
    }
    if let Some(want) = expected {
        if sha256_hex(&want.to_toml()) != config_hash {
            return fail("table was produced from a different configuration".into());
        }
    }
    Ok(VerifiedTable {
        experiment: get("experiment")?,
        command: get("command")?,
        seed,
        config_sha256: config_hash,
        rows: data.lines().count().saturating_sub(1),
    })
}
