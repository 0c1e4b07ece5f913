//! Laser-selected bright pair states and the mean blockade shift
//! 1/δ_R² = Σ_φ κ_φ² / ΔE_φ².

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::angular::{projections, wigner_d_matrix};
use crate::error::{Error, Result};
use crate::pair::PairSpectrum;
use crate::species::Term;

/// Overlaps at or below this are treated as zero.
pub const OVERLAP_FLOOR: f64 = 1e-12;

/// Excitation scheme: s1/2 or d3/2 Rydberg state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    S,
    D,
}

impl Scheme {
    pub fn term(self) -> Term {
        match self {
            Scheme::S => Term { l: 0, j2: 1 },
            Scheme::D => Term { l: 2, j2: 3 },
        }
    }

    pub fn from_term(term: Term) -> Result<Self> {
        match (term.l, term.j2) {
            (0, 1) => Ok(Scheme::S),
            (2, 3) => Ok(Scheme::D),
            _ => Err(Error::InvalidArgument(format!(
                "no bright-state scheme for {term}; use s1/2 or d3/2"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::S => "s",
            Scheme::D => "d",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s" | "s1/2" => Ok(Scheme::S),
            "d" | "d3/2" => Ok(Scheme::D),
            other => Err(Error::InvalidArgument(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Product bright state v ⊗ v on the pair Zeeman basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BrightPairState {
    pub scheme: Scheme,
    pub j2: u32,
    /// Single-atom vector, m from +j down to −j.
    pub single: DVector<f64>,
    pub amplitudes: DVector<f64>,
}

/// (|+½⟩ ± |−½⟩)/√2 per atom: + for the s scheme, − for the d scheme.
/// For d3/2 the m = ±3/2 components are zero.
pub fn bright_pair_state(scheme: Scheme) -> BrightPairState {
    let j2 = scheme.term().j2;
    let sign = match scheme {
        Scheme::S => 1.0,
        Scheme::D => -1.0,
    };
    let ms = projections(j2);
    let single = DVector::from_iterator(
        ms.len(),
        ms.iter().map(|&m| match m {
            1 => std::f64::consts::FRAC_1_SQRT_2,
            -1 => sign * std::f64::consts::FRAC_1_SQRT_2,
            _ => 0.0,
        }),
    );
    let amplitudes = single.kronecker(&single);
    BrightPairState {
        scheme,
        j2,
        single,
        amplitudes,
    }
}

/// d^j(θ) ⊗ d^j(θ).
pub fn pair_rotation(j2: u32, theta: f64) -> DMatrix<f64> {
    let d = wigner_d_matrix(j2, theta);
    d.kronecker(&d)
}

/// Bright-state amplitudes in the frame whose z axis is the interatomic
/// axis, tilted by θ from the laser polarization.
pub fn rotate_to_molecular_frame(state: &BrightPairState, theta: f64) -> DVector<f64> {
    let d = wigner_d_matrix(state.j2, theta);
    let v = &d * &state.single;
    v.kronecker(&v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap {
    /// ΔE_φ, MHz.
    pub energy_mhz: f64,
    /// κ_φ².
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockadeResult {
    /// MHz, positive.
    pub delta_r_mhz: f64,
    /// Signed by the overlap-weighted mean of ΔE_φ, MHz.
    pub signed_delta_r_mhz: f64,
    pub r_um: f64,
    pub theta: f64,
    pub overlaps: Vec<Overlap>,
}

impl BlockadeResult {
    pub fn total_weight(&self) -> f64 {
        self.overlaps.iter().map(|o| o.weight).sum()
    }
}

/// Mean blockade shift of the bright state at separation `r_um` and angle
/// `theta` between the interatomic axis and the laser polarization.
pub fn blockade_shift(spectrum: &PairSpectrum, state: &BrightPairState, r_um: f64, theta: f64) -> Result<BlockadeResult> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, π]")));
    }
    if spectrum.dimension() != state.amplitudes.len() {
        return Err(Error::InvalidArgument(format!(
            "spectrum dimension {} does not match the {} scheme",
            spectrum.dimension(),
            state.scheme
        )));
    }
    let psi = rotate_to_molecular_frame(state, theta);
    let mut result = shift_for_amplitudes(spectrum, &psi, r_um)?;
    result.theta = theta;
    Ok(result)
}

/// Mean blockade shift of arbitrary pair amplitudes already expressed in
/// the spectrum's frame.
pub fn shift_for_amplitudes(spectrum: &PairSpectrum, psi: &DVector<f64>, r_um: f64) -> Result<BlockadeResult> {
    if !(r_um.is_finite() && r_um > 0.0) {
        return Err(Error::InvalidArgument(format!("separation must be positive, got {r_um}")));
    }
    let energies = spectrum.eigenvalues_at(r_um);
    let kappa = spectrum.eigenvectors.transpose() * psi;
    let scale = energies.amax();
    let mut inv_sq = 0.0;
    let mut weighted = 0.0;
    let mut overlaps = Vec::with_capacity(energies.len());
    for (e, k) in energies.iter().zip(kappa.iter()) {
        let w = k * k;
        overlaps.push(Overlap {
            energy_mhz: *e,
            weight: w,
        });
        if w <= OVERLAP_FLOOR {
            continue;
        }
        if e.abs() <= 1e-12 * scale || *e == 0.0 {
            return Err(Error::ForsterZero {
                energy_mhz: *e,
                weight: w,
            });
        }
        inv_sq += w / (e * e);
        weighted += w * e;
    }
    if inv_sq == 0.0 {
        return Err(Error::InvalidArgument("state has no overlap with the pair spectrum".into()));
    }
    let delta_r = inv_sq.sqrt().recip();
    let sign = if weighted < 0.0 { -1.0 } else { 1.0 };
    Ok(BlockadeResult {
        delta_r_mhz: delta_r,
        signed_delta_r_mhz: sign * delta_r,
        r_um,
        theta: 0.0,
        overlaps,
    })
}
