//! (R, θ) maps of the blockade shift and gate fidelity.
//!
//! A sweep is described by a TOML file; every field has a default:
//!
//! ```toml
//! scheme = "s"            # "s" (70s1/2) or "d" (70d3/2)
//! n = 70
//! omega_mhz = 7.0         # Ω/2π
//! gamma_r = 0.0066667     # Rydberg decay rate, 1/μs
//! mode = "finite"         # or "perfect"
//!
//! [r]                     # μm
//! start = 3.0
//! stop = 12.0
//! step = 0.1
//!
//! [theta]                 # rad
//! start = 0.0
//! stop = 3.141592653589793
//! step = 0.017453292519943295
//!
//! [calibration]
//! kind = "auto"           # or kind = "explicit" with delta_mhz and xi
//!
//! [r_min]
//! safety_factor = 1.0     # or override_um = 4.0
//!
//! [c6]
//! n_window = 4
//! defect_cutoff_ghz = 15.0
//! guard_mhz = 10.0
//! ```

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::blockade::{blockade_shift, bright_pair_state, Scheme};
use crate::error::{Error, Result};
use crate::gate::{bell_fidelity, calibrate, pulse_duration, BlockadeMode, GateParams, PropagatorConfig};
use crate::pair::{C6Options, InteractionChannel, PairModel};
use crate::species::SpeciesModel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeSpec {
    /// start, start + step, … up to stop (inclusive within 1e-9 steps).
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| (self.start + i as f64 * self.step).min(self.stop))
            .collect()
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(Error::Config(format!("{what}: non-finite range")));
        }
        if self.step <= 0.0 || self.stop < self.start {
            return Err(Error::Config(format!(
                "{what}: need step > 0 and stop ≥ start, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CalibrationSpec {
    Auto,
    Explicit { delta_mhz: f64, xi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RMinPolicy {
    pub safety_factor: f64,
    /// Fixed cutoff in μm instead of the estimate.
    pub override_um: Option<f64>,
}

impl Default for RMinPolicy {
    fn default() -> Self {
        RMinPolicy {
            safety_factor: 1.0,
            override_um: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct C6Settings {
    pub n_window: u32,
    pub defect_cutoff_ghz: Option<f64>,
    pub guard_mhz: f64,
}

impl Default for C6Settings {
    fn default() -> Self {
        let d = C6Options::default();
        C6Settings {
            n_window: d.n_window,
            defect_cutoff_ghz: d.defect_cutoff_ghz,
            guard_mhz: d.guard_mhz,
        }
    }
}

impl C6Settings {
    pub fn options(&self) -> C6Options {
        C6Options {
            n_window: self.n_window,
            defect_cutoff_ghz: self.defect_cutoff_ghz,
            guard_mhz: self.guard_mhz,
            ..C6Options::default()
        }
    }
}

/// Representative Rydberg decay rate at n ≈ 70 (150 μs lifetime), 1/μs.
pub const DEFAULT_GAMMA_R: f64 = 1.0 / 150.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub scheme: Scheme,
    pub n: u32,
    pub omega_mhz: f64,
    pub gamma_r: f64,
    pub mode: BlockadeMode,
    pub r: RangeSpec,
    pub theta: RangeSpec,
    pub calibration: CalibrationSpec,
    pub r_min: RMinPolicy,
    pub c6: C6Settings,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            scheme: Scheme::S,
            n: 70,
            omega_mhz: 7.0,
            gamma_r: DEFAULT_GAMMA_R,
            mode: BlockadeMode::Finite,
            r: RangeSpec {
                start: 3.0,
                stop: 12.0,
                step: 0.1,
            },
            theta: RangeSpec {
                start: 0.0,
                stop: std::f64::consts::PI,
                step: std::f64::consts::PI / 180.0,
            },
            calibration: CalibrationSpec::Auto,
            r_min: RMinPolicy::default(),
            c6: C6Settings::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("sweep config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.r.validate("r")?;
        self.theta.validate("theta")?;
        if self.r.start <= 0.0 {
            return Err(Error::Config("r.start must be positive".into()));
        }
        if self.theta.start < 0.0 || self.theta.stop > std::f64::consts::PI + 1e-12 {
            return Err(Error::Config("theta must lie in [0, π]".into()));
        }
        if !(self.omega_mhz.is_finite() && self.omega_mhz > 0.0) {
            return Err(Error::Config("omega_mhz must be positive".into()));
        }
        if !(self.gamma_r.is_finite() && self.gamma_r >= 0.0) {
            return Err(Error::Config("gamma_r must be non-negative".into()));
        }
        if !(self.r_min.safety_factor.is_finite() && self.r_min.safety_factor > 0.0) {
            return Err(Error::Config("r_min.safety_factor must be positive".into()));
        }
        if self.n <= self.scheme.term().l + 1 {
            return Err(Error::Config(format!("n = {} too small", self.n)));
        }
        Ok(())
    }
}

/// Crossover separation below which the R⁻⁶ expansion degrades:
/// max over channels of (|C6| / min|δ_AB|)^(1/6), times `safety_factor`.
pub fn r_min_estimate(channels: &[InteractionChannel], safety_factor: f64) -> Result<f64> {
    let mut best: Option<f64> = None;
    for ch in channels {
        if let Some(d) = ch.min_defect_ghz() {
            let r = (ch.c6.abs() / d).powf(1.0 / 6.0);
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    best.map(|r| r * safety_factor)
        .ok_or_else(|| Error::InvalidArgument("no channels with retained pair terms".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapRecord {
    #[serde(rename = "R")]
    pub r_um: f64,
    pub theta: f64,
    pub z: f64,
    pub y: f64,
    #[serde(rename = "delta_R_MHz")]
    pub delta_r_mhz: Option<f64>,
    pub fidelity: Option<f64>,
    pub valid: bool,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub delta_mhz: f64,
    pub xi: f64,
    pub tau_ns: f64,
}

#[derive(Clone, Debug)]
pub struct MapRun {
    pub records: Vec<MapRecord>,
    pub channels: Vec<InteractionChannel>,
    pub r_min_um: f64,
    pub calibration: CalibrationRecord,
}

/// Evaluates one grid point; errors become the record's error tag.
pub fn map_point(
    pair: &PairModel,
    config: &SweepConfig,
    cal: &CalibrationRecord,
    r_min: f64,
    r_um: f64,
    theta: f64,
) -> MapRecord {
    let mut record = MapRecord {
        r_um,
        theta,
        z: r_um * theta.cos(),
        y: r_um * theta.sin(),
        delta_r_mhz: None,
        fidelity: None,
        valid: r_um >= r_min,
        error: None,
    };
    let outcome = (|| -> Result<(f64, f64)> {
        let state = bright_pair_state(config.scheme);
        let shift = blockade_shift(&pair.spectrum, &state, r_um, theta)?;
        let params = GateParams {
            omega_mhz: config.omega_mhz,
            delta_mhz: cal.delta_mhz,
            xi: cal.xi,
            tau_ns: cal.tau_ns,
            delta_r_mhz: shift.signed_delta_r_mhz,
            gamma_r: config.gamma_r,
            stark_phase: 0.0,
            mode: config.mode,
        };
        let gate = bell_fidelity(&params, &PropagatorConfig::default())?;
        Ok((shift.delta_r_mhz, gate.fidelity))
    })();
    match outcome {
        Ok((d, f)) => {
            record.delta_r_mhz = Some(d);
            record.fidelity = Some(f);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

pub fn resolve_calibration(config: &SweepConfig) -> Result<CalibrationRecord> {
    let (delta_mhz, xi) = match config.calibration {
        CalibrationSpec::Auto => {
            let c = calibrate(config.omega_mhz)?;
            (c.delta_mhz, c.xi)
        }
        CalibrationSpec::Explicit { delta_mhz, xi } => (delta_mhz, xi),
    };
    Ok(CalibrationRecord {
        delta_mhz,
        xi,
        tau_ns: pulse_duration(config.omega_mhz, delta_mhz)?,
    })
}

/// Runs the full pipeline over the grid, row-major in (R, θ).
pub fn run_map(config: &SweepConfig, species: &SpeciesModel) -> Result<MapRun> {
    config.validate()?;
    let pair = PairModel::new(species, config.n, config.scheme.term(), &config.c6.options())?;
    let cal = resolve_calibration(config)?;
    let r_min_um = match config.r_min.override_um {
        Some(r) => r,
        None => r_min_estimate(&pair.channels, config.r_min.safety_factor)?,
    };
    let grid: Vec<(f64, f64)> = config
        .r
        .points()
        .into_iter()
        .flat_map(|r| config.theta.points().into_iter().map(move |t| (r, t)))
        .collect();
    let records = grid
        .par_iter()
        .map(|&(r, t)| map_point(&pair, config, &cal, r_min_um, r, t))
        .collect();
    Ok(MapRun {
        records,
        channels: pair.channels,
        r_min_um,
        calibration: cal,
    })
}

pub fn write_csv<W: Write>(records: &[MapRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Output(e.to_string()))?;
    Ok(())
}

pub fn csv_bytes(records: &[MapRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(buf)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSummary {
    pub channel: String,
    pub c6_ghz_um6: f64,
    pub min_defect_ghz: Option<f64>,
    pub dominance: f64,
    pub pair_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

/// Everything needed to regenerate a map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_toml: String,
    pub config_sha256: String,
    pub species_name: String,
    pub species_toml: String,
    pub species_sha256: String,
    pub channels: Vec<ChannelSummary>,
    pub r_min_um: f64,
    pub calibration: CalibrationRecord,
    pub outputs: Vec<OutputEntry>,
}

impl Manifest {
    pub fn new(config: &SweepConfig, species_source: &str, run: &MapRun, outputs: Vec<OutputEntry>) -> Result<Self> {
        let species = SpeciesModel::from_toml_str(species_source)?;
        let config_toml = config.to_toml_string();
        Ok(Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: sha256_hex(config_toml.as_bytes()),
            config_toml,
            species_name: species.name,
            species_sha256: sha256_hex(species_source.as_bytes()),
            species_toml: species_source.into(),
            channels: run
                .channels
                .iter()
                .map(|c| ChannelSummary {
                    channel: c.spec.label(),
                    c6_ghz_um6: c.c6,
                    min_defect_ghz: c.min_defect_ghz(),
                    dominance: c.dominance(),
                    pair_terms: c.pair_terms.len(),
                })
                .collect(),
            r_min_um: run.r_min_um,
            calibration: run.calibration,
            outputs,
        })
    }

    /// Re-runs the map from the embedded config and species data, after
    /// checking both hashes.
    pub fn replay(&self) -> Result<MapRun> {
        if sha256_hex(self.config_toml.as_bytes()) != self.config_sha256 {
            return Err(Error::Config("manifest config hash mismatch".into()));
        }
        if sha256_hex(self.species_toml.as_bytes()) != self.species_sha256 {
            return Err(Error::Config("manifest species hash mismatch".into()));
        }
        let config = SweepConfig::from_toml_str(&self.config_toml)?;
        let species = SpeciesModel::from_toml_str(&self.species_toml)?;
        run_map(&config, &species)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}
