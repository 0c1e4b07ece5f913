//! Per-species quantum-defect data.
//!
//! A species file is TOML:
//!
//! ```toml
//! name = "Rb87"
//! mass = 86.909180527      # u, reserved
//! core_radius = 1.0        # bohr, inner cutoff of the radial solver
//! l_max = 3                # series above l_max have zero defect
//! fine_structure = true    # include the α⁴ fine-structure energy term
//!
//! [[defect]]
//! l = 0
//! j = 0.5
//! delta0 = 3.1311804
//! delta2 = 0.1784
//! ```
//!
//! Every `(l, j)` series with `l <= l_max` that has no `[[defect]]` entry
//! gets zero defect. The largest δ0 of series `l + 1` must not exceed the
//! smallest δ0 of series `l`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bundled Rb87 table, the default species of the CLI.
pub const RB87_TOML: &str = include_str!("../data/rb87.toml");

const SPECTROSCOPIC: [char; 7] = ['s', 'p', 'd', 'f', 'g', 'h', 'i'];

/// Orbital and total electronic angular momentum of a fine-structure series,
/// with `j` stored doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub l: u32,
    pub j2: u32,
}

impl Term {
    pub fn new(l: u32, j2: u32) -> Result<Self> {
        if j2 % 2 == 0 || (j2 != 2 * l + 1 && j2 + 1 != 2 * l) {
            return Err(Error::QuantumNumbers(format!(
                "j = {}/2 is not l ± 1/2 for l = {l}",
                j2
            )));
        }
        Ok(Term { l, j2 })
    }

    pub fn from_j(l: u32, j: f64) -> Result<Self> {
        let j2 = 2.0 * j;
        if !j2.is_finite() || j2 < 0.0 || (j2 - j2.round()).abs() > 1e-9 {
            return Err(Error::QuantumNumbers(format!("j = {j} is not a half-integer")));
        }
        Term::new(l, j2.round() as u32)
    }

    pub fn j(self) -> f64 {
        f64::from(self.j2) / 2.0
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match SPECTROSCOPIC.get(self.l as usize) {
            Some(c) => write!(f, "{c}{}/2", self.j2),
            None => write!(f, "l{}_{}/2", self.l, self.j2),
        }
    }
}

impl FromStr for Term {
    type Err = Error;

    /// Parses `p3/2`-style labels.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let letter = chars
            .next()
            .ok_or_else(|| Error::QuantumNumbers("empty term".into()))?;
        let l = SPECTROSCOPIC
            .iter()
            .position(|&c| c == letter.to_ascii_lowercase())
            .ok_or_else(|| Error::QuantumNumbers(format!("unknown orbital letter in {s:?}")))?;
        let rest = chars.as_str();
        let j2 = rest
            .strip_suffix("/2")
            .and_then(|num| num.parse::<u32>().ok())
            .ok_or_else(|| Error::QuantumNumbers(format!("expected j as k/2 in {s:?}")))?;
        Term::new(l as u32, j2)
    }
}

/// A labelled state such as `70s1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateLabel {
    pub n: u32,
    pub term: Term,
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let split = s
            .find(|c: char| !c.is_ascii_digit())
            .ok_or_else(|| Error::QuantumNumbers(format!("missing orbital in {s:?}")))?;
        let n = s[..split]
            .parse::<u32>()
            .map_err(|_| Error::QuantumNumbers(format!("missing principal number in {s:?}")))?;
        let term: Term = s[split..].parse()?;
        if n <= term.l {
            return Err(Error::QuantumNumbers(format!("n = {n} must exceed l = {}", term.l)));
        }
        Ok(StateLabel { n, term })
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.n, self.term)
    }
}

/// Rydberg–Ritz coefficients of one series.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RitzCoefficients {
    pub delta0: f64,
    pub delta2: f64,
}

/// Quantum defect at a given n. `beyond_l_max` is set when the series lies
/// above the model's `l_max` and the defect was taken as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defect {
    pub value: f64,
    pub beyond_l_max: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeciesModel {
    pub name: String,
    pub core_radius: f64,
    pub mass: f64,
    pub l_max: u32,
    pub fine_structure: bool,
    defects: BTreeMap<Term, RitzCoefficients>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesFile {
    name: String,
    #[serde(default)]
    mass: f64,
    core_radius: f64,
    l_max: u32,
    #[serde(default = "default_true")]
    fine_structure: bool,
    #[serde(default, rename = "defect")]
    defects: Vec<DefectEntry>,
}

fn default_true() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DefectEntry {
    l: u32,
    j: f64,
    delta0: f64,
    #[serde(default)]
    delta2: f64,
}

impl SpeciesModel {
    /// Builds and validates a model. Series up to `l_max` that are missing
    /// from `defects` default to zero.
    pub fn new(
        name: impl Into<String>,
        core_radius: f64,
        mass: f64,
        l_max: u32,
        fine_structure: bool,
        defects: impl IntoIterator<Item = (Term, RitzCoefficients)>,
    ) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::Schema("name must not be empty".into()));
        }
        if !(core_radius.is_finite() && core_radius > 0.0) {
            return Err(Error::Schema(format!("core_radius must be positive, got {core_radius}")));
        }
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::Schema(format!("mass must be non-negative, got {mass}")));
        }
        if l_max < 3 {
            return Err(Error::Schema(format!(
                "l_max = {l_max}: f series (l = 3) are needed for d-state channels"
            )));
        }

        let mut table = BTreeMap::new();
        for (term, coeffs) in defects {
            if term.l > l_max {
                return Err(Error::Schema(format!("defect for {term} lies above l_max = {l_max}")));
            }
            if !(coeffs.delta0.is_finite() && coeffs.delta2.is_finite()) {
                return Err(Error::Schema(format!("non-finite defect for {term}")));
            }
            if table.insert(term, coeffs).is_some() {
                return Err(Error::Schema(format!("duplicate defect entry for {term}")));
            }
        }
        for l in 0..=l_max {
            for j2 in [2 * l + 1, (2 * l).saturating_sub(1)] {
                if j2 == 0 {
                    continue;
                }
                table.entry(Term { l, j2 }).or_default();
            }
        }

        for l in 0..l_max {
            let lower = series_delta0(&table, l);
            let upper = series_delta0(&table, l + 1);
            let min_lower = lower.iter().copied().fold(f64::INFINITY, f64::min);
            let max_upper = upper.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max_upper > min_lower {
                return Err(Error::DefectOrdering(format!(
                    "δ0 = {max_upper} for l = {} exceeds δ0 = {min_lower} for l = {l}",
                    l + 1
                )));
            }
        }

        Ok(SpeciesModel {
            name,
            core_radius,
            mass,
            l_max,
            fine_structure,
            defects: table,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SpeciesFile = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let mut defects = Vec::with_capacity(file.defects.len());
        for entry in file.defects {
            let term = Term::from_j(entry.l, entry.j)?;
            defects.push((
                term,
                RitzCoefficients {
                    delta0: entry.delta0,
                    delta2: entry.delta2,
                },
            ));
        }
        SpeciesModel::new(
            file.name,
            file.core_radius,
            file.mass,
            file.l_max,
            file.fine_structure,
            defects,
        )
    }

    pub fn to_toml_string(&self) -> String {
        let file = SpeciesFile {
            name: self.name.clone(),
            mass: self.mass,
            core_radius: self.core_radius,
            l_max: self.l_max,
            fine_structure: self.fine_structure,
            defects: self
                .defects
                .iter()
                .map(|(term, c)| DefectEntry {
                    l: term.l,
                    j: term.j(),
                    delta0: c.delta0,
                    delta2: c.delta2,
                })
                .collect(),
        };
        toml::to_string(&file).expect("species model serializes")
    }

    pub fn ritz(&self, term: Term) -> Option<RitzCoefficients> {
        self.defects.get(&term).copied()
    }

    pub fn series(&self) -> impl Iterator<Item = (Term, RitzCoefficients)> + '_ {
        self.defects.iter().map(|(t, c)| (*t, *c))
    }

    /// δ(n) = δ0 + δ2 / (n − δ0)².
    pub fn quantum_defect(&self, n: u32, term: Term) -> Result<Defect> {
        if n <= term.l {
            return Err(Error::QuantumNumbers(format!("n = {n} must exceed l = {}", term.l)));
        }
        if term.l > self.l_max {
            return Ok(Defect {
                value: 0.0,
                beyond_l_max: true,
            });
        }
        let c = self.defects.get(&term).copied().unwrap_or_default();
        let denom = f64::from(n) - c.delta0;
        Ok(Defect {
            value: c.delta0 + c.delta2 / (denom * denom),
            beyond_l_max: false,
        })
    }
}

fn series_delta0(table: &BTreeMap<Term, RitzCoefficients>, l: u32) -> Vec<f64> {
    table
        .iter()
        .filter(|(t, _)| t.l == l)
        .map(|(_, c)| c.delta0)
        .collect()
}
