//! Finite-size ground-state energy series.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::Twist;

/// Quasi-particle statistics; the sign ε in `e_L = ε (ν/2) S_L(ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    pub fn flipped(self) -> Statistics {
        match self {
            Statistics::Boson => Statistics::Fermion,
            Statistics::Fermion => Statistics::Boson,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boson" | "bosons" | "+1" => Ok(Statistics::Boson),
            "fermion" | "fermions" | "-1" => Ok(Statistics::Fermion),
            other => Err(Error::Parse(format!("unknown statistics '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Synthetic,
    ExactDiag,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEntry {
    pub e_total: f64,
    pub e_per_site: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMetadata {
    pub nu: Option<f64>,
    pub source: Source,
    pub e_inf: Option<f64>,
    pub model: Option<String>,
}

impl SeriesMetadata {
    pub fn new(source: Source) -> Self {
        SeriesMetadata {
            nu: None,
            source,
            e_inf: None,
            model: None,
        }
    }
}

/// Ground-state energies keyed by `(L, twist)`. Iteration is ordered by
/// twist first, then by increasing `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    entries: BTreeMap<(Twist, usize), EnergyEntry>,
    pub metadata: SeriesMetadata,
}

impl EnergySeries {
    pub fn new(metadata: SeriesMetadata) -> Self {
        EnergySeries {
            entries: BTreeMap::new(),
            metadata,
        }
    }

    /// Insert a total energy. Rejects `L = 0`, non-finite energies and
    /// duplicates.
    pub fn insert(&mut self, l: usize, twist: Twist, e_total: f64) -> Result<()> {
        if l == 0 {
            return Err(Error::InvalidInput("lattice size must be positive".into()));
        }
        if !e_total.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite energy at L={l} ({twist})"
            )));
        }
        let entry = EnergyEntry {
            e_total,
            e_per_site: e_total / l as f64,
        };
        if self.entries.insert((twist, l), entry).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate entry L={l} ({twist})"
            )));
        }
        Ok(())
    }

    pub fn get(&self, l: usize, twist: Twist) -> Option<&EnergyEntry> {
        self.entries.get(&(twist, l))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Twist, &EnergyEntry)> {
        self.entries.iter().map(|(&(t, l), e)| (l, t, e))
    }

    /// Sizes available for one twist, increasing.
    pub fn sizes(&self, twist: Twist) -> Vec<usize> {
        self.entries
            .range((twist, 0)..=(twist, usize::MAX))
            .map(|(&(_, l), _)| l)
            .collect()
    }

    pub fn twists(&self) -> Vec<Twist> {
        Twist::BOTH
            .into_iter()
            .filter(|&t| !self.sizes(t).is_empty())
            .collect()
    }

    /// `L → e_L` for one twist.
    pub fn densities(&self, twist: Twist) -> BTreeMap<usize, f64> {
        self.entries
            .range((twist, 0)..=(twist, usize::MAX))
            .map(|(&(_, l), e)| (l, e.e_per_site))
            .collect()
    }
}
