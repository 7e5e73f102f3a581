//! The `{"kind": …, "payload": …}` wrapper used for every file the tool reads or
//! writes.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;
use immersion_core::MultiGraph;

pub const GRAPH: &str = "graph";
pub const IMMERSION: &str = "immersion-certificate";
pub const MINOR: &str = "minor-certificate";
pub const TREE_DECOMPOSITION: &str = "tree-decomposition";
pub const RING: &str = "ring-decomposition";
pub const SCRIPT: &str = "lifting-script";
pub const VERTEX_SET: &str = "vertex-set";
pub const REPORT: &str = "experiment-report";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub kind: String,
    pub payload: Value,
}

impl Envelope {
    pub fn wrap(kind: &str, payload: &impl Serialize) -> Result<Self, CliError> {
        Ok(Envelope { kind: kind.to_string(), payload: serde_json::to_value(payload)? })
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let value: Value = serde_json::from_str(&text)?;
        match serde_json::from_value::<Envelope>(value.clone()) {
            Ok(env) => Ok(env),
            // bare payloads are accepted and classified by the caller
            Err(_) => Ok(Envelope { kind: String::new(), payload: value }),
        }
    }

    /// Payload as `T`, insisting on `kind` when the file carried one.
    pub fn open<T: DeserializeOwned>(&self, kind: &str) -> Result<T, CliError> {
        if !self.kind.is_empty() && self.kind != kind {
            return Err(CliError::Input(format!("expected a {kind} file, found {}", self.kind)));
        }
        Ok(serde_json::from_value(self.payload.clone())?)
    }
}

pub fn read_as<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T, CliError> {
    Envelope::read(path)?.open(kind)
}

pub fn read_graph(path: &Path) -> Result<MultiGraph, CliError> {
    read_as(path, GRAPH)
}
