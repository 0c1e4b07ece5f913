//! Rydberg level energies, radial wavefunctions and radial matrix elements.
//!
//! The radial equation for χ(r) = r·R(r) is solved on a grid uniform in
//! x = √r. With X(x) = χ(r)·r^(−1/4) it becomes
//!
//! ```text
//! X'' = [ (2l + ½)(2l + 3/2) / x² + 8x² (V(x²) − E) ] X,   V(r) = −1/r
//! ```
//!
//! which has no first-derivative term and is integrated inward with Numerov's
//! method. In these variables ∫χ² dr = ∫2x²X² dx and ⟨1|r|2⟩ = ∫2x⁴X₁X₂ dx.
//! Atomic units throughout, except energies, which are reported in GHz.

use std::fmt;

use crate::error::{Error, Result};
use crate::species::{SpeciesModel, Term};
use crate::units::{FINE_STRUCTURE, HARTREE_GHZ};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RydbergLevel {
    pub n: u32,
    pub term: Term,
    /// Binding energy relative to the ionization threshold, GHz.
    pub energy_ghz: f64,
    /// Effective principal quantum number n − δ.
    pub n_star: f64,
}

impl RydbergLevel {
    pub fn new(model: &SpeciesModel, n: u32, term: Term) -> Result<Self> {
        let n_star = effective_n(model, n, term)?;
        let energy_ghz = energy_hartree(model, n, term, n_star) * HARTREE_GHZ;
        if !(energy_ghz < 0.0) {
            return Err(Error::QuantumNumbers(format!(
                "{n}{term} is not bound (E = {energy_ghz} GHz)"
            )));
        }
        Ok(RydbergLevel {
            n,
            term,
            energy_ghz,
            n_star,
        })
    }

    fn energy_hartree(&self) -> f64 {
        self.energy_ghz / HARTREE_GHZ
    }
}

impl fmt::Display for RydbergLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.n, self.term)
    }
}

fn effective_n(model: &SpeciesModel, n: u32, term: Term) -> Result<f64> {
    let defect = model.quantum_defect(n, term)?;
    if defect.beyond_l_max {
        log::debug!("{n}{term}: above l_max, using zero quantum defect");
    }
    let n_star = f64::from(n) - defect.value;
    if n_star <= 0.0 {
        return Err(Error::QuantumNumbers(format!(
            "{n}{term}: effective quantum number {n_star} is not positive"
        )));
    }
    Ok(n_star)
}

fn energy_hartree(model: &SpeciesModel, n: u32, term: Term, n_star: f64) -> f64 {
    let mut e = -0.5 / (n_star * n_star);
    if model.fine_structure {
        let nf = f64::from(n);
        let a2 = FINE_STRUCTURE * FINE_STRUCTURE;
        e -= 0.5 * a2 / nf.powi(4) * (nf / (term.j() + 0.5) - 0.75);
    }
    e
}

/// Level energy in GHz: the Rydberg term with quantum defect plus the
/// leading fine-structure correction.
pub fn level_energy(model: &SpeciesModel, n: u32, term: Term) -> Result<f64> {
    Ok(RydbergLevel::new(model, n, term)?.energy_ghz)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    /// Step in x = √r, units of √a0.
    pub step: f64,
    /// Rejection threshold: the step must resolve the shortest local
    /// wavelength with at least this many points.
    pub min_points_per_wavelength: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            step: 0.01,
            min_points_per_wavelength: 10.0,
        }
    }
}

/// Radial wavefunction sampled at x_i = i·step for i in
/// `first_index .. first_index + values.len()`.
#[derive(Clone, Debug)]
pub struct RadialWavefunction {
    pub level: RydbergLevel,
    pub step: f64,
    pub first_index: usize,
    /// X(x_i) = χ(r_i) r_i^(−1/4), normalized so that ∫2x²X² dx = 1.
    pub values: Vec<f64>,
    pub norm_residual: f64,
}

impl RadialWavefunction {
    pub fn x(&self, k: usize) -> f64 {
        (self.first_index + k) as f64 * self.step
    }

    pub fn r(&self, k: usize) -> f64 {
        let x = self.x(k);
        x * x
    }

    /// χ(r) at grid point k.
    pub fn chi(&self, k: usize) -> f64 {
        self.values[k] * self.x(k).sqrt()
    }

    /// Radial grid and χ(r) samples.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.values.len()).map(|k| (self.r(k), self.chi(k)))
    }

    pub fn node_count(&self) -> usize {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = peak * 1e-10;
        let mut last = 0.0f64;
        let mut nodes = 0;
        for &v in &self.values {
            if v.abs() <= floor {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                nodes += 1;
            }
            last = v;
        }
        nodes
    }

    /// ∫ f(r) χ(r)² dr.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        let weights: Vec<f64> = (0..self.values.len())
            .map(|k| {
                let x = self.x(k);
                2.0 * x * x * f(x * x) * self.values[k] * self.values[k]
            })
            .collect();
        trapezoid(&weights, self.step)
    }
}

fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => h * (samples[1..n - 1].iter().sum::<f64>() + 0.5 * (samples[0] + samples[n - 1])),
    }
}

/// Outer boundary of the integration, a0.
pub fn outer_radius(n: u32) -> f64 {
    let n = f64::from(n);
    2.0 * n * (n + 15.0)
}

/// Solves for the radial wavefunction of `level` by inward Numerov
/// integration from `outer_radius(n)` to the species core radius.
pub fn solve_radial(model: &SpeciesModel, level: &RydbergLevel, grid: GridSpec) -> Result<RadialWavefunction> {
    let h = grid.step;
    if !(h.is_finite() && h > 0.0) || !(grid.min_points_per_wavelength > 0.0) {
        return Err(Error::InvalidArgument(format!("bad grid specification {grid:?}")));
    }
    let e = level.energy_hartree();
    let l = f64::from(level.term.l);
    let centrifugal = (2.0 * l + 0.5) * (2.0 * l + 1.5);
    let g = |x: f64| centrifugal / (x * x) + 8.0 * x * x * (-1.0 / (x * x) - e);

    let outer = ((outer_radius(level.n).sqrt() / h).ceil() as usize).max(3);
    let inner = ((model.core_radius.sqrt() / h).ceil() as usize).max(1);
    if inner + 2 >= outer {
        return Err(Error::InvalidArgument(format!(
            "core radius {} leaves no room below the outer radius {}",
            model.core_radius,
            outer_radius(level.n)
        )));
    }

    // Shortest local wavelength in x over the grid.
    let k2_max = (inner..=outer)
        .map(|i| -g(i as f64 * h))
        .fold(f64::NEG_INFINITY, f64::max);
    if k2_max > 0.0 {
        let wavelength = std::f64::consts::TAU / k2_max.sqrt();
        if h > wavelength / grid.min_points_per_wavelength {
            return Err(Error::GridTooCoarse {
                step: h,
                wavelength,
                min_points: grid.min_points_per_wavelength,
            });
        }
    }

    let len = outer - inner + 1;
    let f: Vec<f64> = (inner..=outer).map(|i| 1.0 - h * h * g(i as f64 * h) / 12.0).collect();
    let mut y = vec![0.0; len];
    y[len - 1] = 1e-30;
    y[len - 2] = 1e-30 * (1.0 + h * (-g((outer - 1) as f64 * h)).abs().sqrt().max(1e-3));

    let r_turn = inner_turning_point(e, level.term.l);
    let mut cut = 0usize;
    for k in (1..len - 1).rev() {
        let next = ((12.0 - 10.0 * f[k]) * y[k] - f[k + 1] * y[k + 1]) / f[k - 1];
        if !next.is_finite() {
            return Err(Error::Integration {
                level: level.to_string(),
                reason: format!("non-finite value at r = {}", ((inner + k - 1) as f64 * h).powi(2)),
            });
        }
        y[k - 1] = next;
        if next.abs() > 1e200 {
            for v in &mut y[k - 1..] {
                *v *= 1e-200;
            }
        }
        let r = ((inner + k - 1) as f64 * h).powi(2);
        if r < r_turn && y[k - 1].abs() > y[k].abs() {
            cut = k;
            break;
        }
    }
    let values = &y[cut..];
    if values.len() < 16 {
        return Err(Error::Integration {
            level: level.to_string(),
            reason: "solution diverges before the classically allowed region".into(),
        });
    }
    let first_index = inner + cut;

    let density: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let x = (first_index + k) as f64 * h;
            2.0 * x * x * v * v
        })
        .collect();
    let norm = trapezoid(&density, h);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::Integration {
            level: level.to_string(),
            reason: format!("normalization integral {norm}"),
        });
    }
    let scale = norm.sqrt().recip();
    let values: Vec<f64> = values.iter().map(|v| v * scale).collect();
    let mut wf = RadialWavefunction {
        level: *level,
        step: h,
        first_index,
        values,
        norm_residual: 0.0,
    };
    wf.norm_residual = (wf.expectation(|_| 1.0) - 1.0).abs();
    Ok(wf)
}

/// Inner classical turning point of the Coulomb + centrifugal potential
/// at energy e (hartree), or 0 for l = 0.
fn inner_turning_point(e: f64, l: u32) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let ll = f64::from(l * (l + 1));
    let disc = 1.0 + 2.0 * e * ll;
    if disc <= 0.0 {
        return 0.0;
    }
    (1.0 - disc.sqrt()) / (-2.0 * e)
}

/// ⟨w1|r|w2⟩ in a0, integrated over the overlap of the two grids.
pub fn radial_matrix_element(w1: &RadialWavefunction, w2: &RadialWavefunction) -> Result<f64> {
    overlap_integral(w1, w2, 4)
}

/// ⟨w1|w2⟩.
pub fn radial_overlap(w1: &RadialWavefunction, w2: &RadialWavefunction) -> Result<f64> {
    overlap_integral(w1, w2, 2)
}

fn overlap_integral(w1: &RadialWavefunction, w2: &RadialWavefunction, power: i32) -> Result<f64> {
    if w1.step != w2.step {
        return Err(Error::Grid(format!("steps differ: {} vs {}", w1.step, w2.step)));
    }
    let lo = w1.first_index.max(w2.first_index);
    let hi = (w1.first_index + w1.values.len()).min(w2.first_index + w2.values.len());
    if lo >= hi {
        return Err(Error::Grid("radial ranges do not overlap".into()));
    }
    let h = w1.step;
    let integrand: Vec<f64> = (lo..hi)
        .map(|i| {
            let x = i as f64 * h;
            2.0 * x.powi(power) * w1.values[i - w1.first_index] * w2.values[i - w2.first_index]
        })
        .collect();
    Ok(trapezoid(&integrand, h))
}
