// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityKind {
    Stable,
    AsymptoticallyStable,
    PracticallyStable,
    Unstable,
    Inconclusive,
}

impl StabilityKind {
    pub fn is_stable_side(self) -> bool {
        matches!(self, Self::Stable | Self::AsymptoticallyStable | Self::PracticallyStable)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaEntry {
    pub epsilon: f64,
    /// Largest sampled `δ` keeping `ξ₀ < ε`; 0 when none was found.
    pub delta: f64,
    pub sup_xi0: f64,
}

/// Sampled evidence for a stability claim. Never a proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub check: String,
    pub kind: StabilityKind,
    pub margins: BTreeMap<String, f64>,
    pub samples: usize,
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub delta_table: Vec<DeltaEntry>,
    pub notes: Vec<String>,
}

impl StabilityVerdict {
    pub fn new(check: impl Into<String>, kind: StabilityKind) -> Self {
        Self {
            check: check.into(),
            kind,
            margins: BTreeMap::new(),
            samples: 0,
            parameters: BTreeMap::new(),
            delta_table: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn margin(mut self, name: &str, value: f64) -> Self {
        self.margins.insert(name.into(), value);
        self
    }

    pub fn parameter(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.into(), value);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}
