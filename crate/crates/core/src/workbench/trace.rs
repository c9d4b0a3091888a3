//! The JSON trace format.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::generate::Pattern;
use crate::error::{Error, Result};
use crate::model::AccessSequence;

/// How a trace was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub pattern: Pattern,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
}

/// A search sequence on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub n: usize,
    pub m: usize,
    pub searches: Vec<u32>,
    pub generator: GeneratorInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TraceFile {
    pub fn new(seq: &AccessSequence, generator: GeneratorInfo, seed: Option<u64>) -> Self {
        TraceFile {
            n: seq.n(),
            m: seq.m(),
            searches: seq.searches().iter().map(|e| e.get()).collect(),
            generator,
            seed,
        }
    }

    /// A trace with no generator metadata.
    pub fn manual(seq: &AccessSequence) -> Self {
        Self::new(seq, GeneratorInfo { pattern: Pattern::Manual, params: BTreeMap::new() }, None)
    }

    /// Checks the declared sizes and builds the sequence.
    pub fn sequence(&self) -> Result<AccessSequence> {
        if self.m != self.searches.len() {
            return Err(Error::Parse(format!("m = {} but {} searches listed", self.m, self.searches.len())));
        }
        AccessSequence::from_keys(self.n, &self.searches)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: TraceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        t.sequence()?;
        Ok(t)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}
