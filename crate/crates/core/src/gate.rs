//! Two-pulse controlled-phase protocol.
//!
//! Both atoms are driven on |b⟩ → |r⟩ with Rabi frequency Ω and detuning Δ
//! by two square pulses of length τ = 2π/√(2Ω² + Δ²); the second pulse has
//! its laser phase shifted by ξ. Rotating frame: a Rydberg excitation sits
//! at −Δ and ⟨lower|H|upper⟩ = (Ω/2)e^{iξ} during the second pulse. Decay
//! out of |r⟩ at rate γ is a non-Hermitian −iγ/2 per excitation, and the
//! lost population counts as error.
//!
//! At the interface, Ω, Δ and δ_R are cyclic frequencies (Ω/2π) in MHz, γ is
//! a rate in 1/μs and τ is in ns. Internally everything is rad/μs and μs.

use std::f64::consts::{PI, TAU};

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::units::mhz_to_angular;

type C = Complex<f64>;

/// τ in ns for cyclic Ω/2π and Δ/2π in MHz.
pub fn pulse_duration(omega_mhz: f64, delta_mhz: f64) -> Result<f64> {
    if !(omega_mhz.is_finite() && omega_mhz > 0.0) || !delta_mhz.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need Ω > 0 and finite Δ, got Ω = {omega_mhz}, Δ = {delta_mhz}"
        )));
    }
    let omega = mhz_to_angular(omega_mhz);
    let delta = mhz_to_angular(delta_mhz);
    Ok(TAU / (2.0 * omega * omega + delta * delta).sqrt() * 1e3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockadeMode {
    /// |rr⟩ removed from the BB sector.
    Perfect,
    /// |rr⟩ detuned by the finite blockade shift.
    Finite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateParams {
    /// Ω/2π, MHz.
    pub omega_mhz: f64,
    /// Δ/2π, MHz.
    pub delta_mhz: f64,
    /// Phase jump of the second pulse, rad.
    pub xi: f64,
    /// Single-pulse duration, ns.
    pub tau_ns: f64,
    /// Signed δ_R/2π, MHz.
    pub delta_r_mhz: f64,
    /// Rydberg decay rate, 1/μs.
    pub gamma_r: f64,
    /// Light shift φ_a of |a⟩ per atom over the whole gate, rad.
    pub stark_phase: f64,
    pub mode: BlockadeMode,
}

impl GateParams {
    /// Parameters with Δ, ξ and τ from [`calibrate`].
    pub fn calibrated(omega_mhz: f64, delta_r_mhz: f64, gamma_r: f64, mode: BlockadeMode) -> Result<Self> {
        let cal = calibrate(omega_mhz)?;
        Ok(GateParams {
            omega_mhz,
            delta_mhz: cal.delta_mhz,
            xi: cal.xi,
            tau_ns: pulse_duration(omega_mhz, cal.delta_mhz)?,
            delta_r_mhz,
            gamma_r,
            stark_phase: 0.0,
            mode,
        })
    }

    fn validate(&self) -> Result<()> {
        let finite = [
            self.omega_mhz,
            self.delta_mhz,
            self.xi,
            self.tau_ns,
            self.delta_r_mhz,
            self.gamma_r,
            self.stark_phase,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite || self.omega_mhz < 0.0 || self.gamma_r < 0.0 || self.tau_ns < 0.0 {
            return Err(Error::InvalidArgument(format!("invalid gate parameters {self:?}")));
        }
        Ok(())
    }

    fn tau_us(&self) -> f64 {
        self.tau_ns * 1e-3
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    AA,
    AB,
    BB,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorConfig {
    /// Largest ‖H‖·h allowed in one step.
    pub max_step_phase: f64,
    pub taylor_order: usize,
    /// Fixed step in μs; `None` picks the largest step within the phase limit.
    pub step_us: Option<f64>,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            max_step_phase: 0.2,
            taylor_order: 14,
            step_us: None,
        }
    }
}

/// Sector Hamiltonian during one pulse, rad/μs.
pub fn sector_hamiltonian(sector: Sector, params: &GateParams, pulse: usize) -> DMatrix<C> {
    let omega = mhz_to_angular(params.omega_mhz);
    let delta = mhz_to_angular(params.delta_mhz);
    let g = params.gamma_r;
    let phase = if pulse == 0 { 0.0 } else { params.xi };
    let drive = C::from_polar(1.0, phase);
    let decay = |k: f64| C::new(-k * delta, -k * g / 2.0);
    match sector {
        Sector::AA => DMatrix::zeros(1, 1),
        Sector::AB => {
            let mut h = DMatrix::zeros(2, 2);
            h[(0, 1)] = drive * (omega / 2.0);
            h[(1, 0)] = drive.conj() * (omega / 2.0);
            h[(1, 1)] = decay(1.0);
            h
        }
        Sector::BB => {
            let dim = match params.mode {
                BlockadeMode::Perfect => 2,
                BlockadeMode::Finite => 3,
            };
            let c = std::f64::consts::SQRT_2 * omega / 2.0;
            let mut h = DMatrix::zeros(dim, dim);
            h[(0, 1)] = drive * c;
            h[(1, 0)] = drive.conj() * c;
            h[(1, 1)] = decay(1.0);
            if dim == 3 {
                h[(1, 2)] = drive * c;
                h[(2, 1)] = drive.conj() * c;
                h[(2, 2)] = decay(2.0) + C::new(mhz_to_angular(params.delta_r_mhz), 0.0);
            }
            h
        }
    }
}

/// Time-resolved evolution of one sector.
#[derive(Clone, Debug)]
pub struct SectorEvolution {
    /// μs.
    pub times: Vec<f64>,
    /// Population of each sector basis state at each time.
    pub populations: Vec<Vec<f64>>,
    /// Population lost to decay, integrated from the instantaneous rate.
    pub decayed: Vec<f64>,
    pub final_state: DVector<C>,
}

impl SectorEvolution {
    /// Amplitude of the initial basis state at the end.
    pub fn return_amplitude(&self) -> C {
        self.final_state[0]
    }
}

fn frobenius(h: &DMatrix<C>) -> f64 {
    h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// exp(−iH·dt) by Taylor series; dt·‖H‖ is kept small by the caller.
fn taylor_propagator(h: &DMatrix<C>, dt: f64, order: usize) -> DMatrix<C> {
    let n = h.nrows();
    let step = h * C::new(0.0, -dt);
    let mut term = DMatrix::<C>::identity(n, n);
    let mut out = term.clone();
    for k in 1..=order {
        term = (&step * &term) / C::new(k as f64, 0.0);
        out += &term;
    }
    out
}

fn decay_rate(h: &DMatrix<C>, psi: &DVector<C>) -> f64 {
    (0..psi.len()).map(|k| -2.0 * h[(k, k)].im * psi[k].norm_sqr()).sum()
}

/// Evolves `psi0` through consecutive piecewise-constant Hamiltonians.
pub fn propagate(
    segments: &[(DMatrix<C>, f64)],
    psi0: &DVector<C>,
    cfg: &PropagatorConfig,
) -> Result<SectorEvolution> {
    if !(cfg.max_step_phase > 0.0) || cfg.taylor_order == 0 {
        return Err(Error::InvalidArgument(format!("bad propagator configuration {cfg:?}")));
    }
    let mut psi = psi0.clone();
    let mut t = 0.0;
    let mut lost = 0.0;
    let mut evo = SectorEvolution {
        times: vec![0.0],
        populations: vec![psi.iter().map(|z| z.norm_sqr()).collect()],
        decayed: vec![0.0],
        final_state: psi.clone(),
    };
    for (h, duration) in segments {
        let norm = frobenius(h);
        if *duration <= 0.0 {
            continue;
        }
        let steps = match cfg.step_us {
            Some(step) => {
                if !(step > 0.0) {
                    return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
                }
                let phase = step * norm;
                if phase > cfg.max_step_phase {
                    return Err(Error::StepTooLarge {
                        phase,
                        limit: cfg.max_step_phase,
                    });
                }
                (duration / step).ceil().max(1.0) as usize
            }
            None => (duration * norm / cfg.max_step_phase).ceil().max(1.0) as usize,
        };
        let dt = duration / steps as f64;
        let quarter = taylor_propagator(h, dt / 4.0, cfg.taylor_order);
        for _ in 0..steps {
            // Boole's rule on the quarter points.
            let mut rates = [decay_rate(h, &psi), 0.0, 0.0, 0.0, 0.0];
            for r in rates.iter_mut().skip(1) {
                psi = &quarter * &psi;
                *r = decay_rate(h, &psi);
            }
            lost += dt / 90.0 * (7.0 * (rates[0] + rates[4]) + 32.0 * (rates[1] + rates[3]) + 12.0 * rates[2]);
            t += dt;
            evo.times.push(t);
            evo.populations.push(psi.iter().map(|z| z.norm_sqr()).collect());
            evo.decayed.push(lost);
        }
    }
    evo.final_state = psi;
    Ok(evo)
}

/// Two-pulse evolution of one sector starting in its computational state.
pub fn evolve_sector(sector: Sector, params: &GateParams, cfg: &PropagatorConfig) -> Result<SectorEvolution> {
    params.validate()?;
    let tau = params.tau_us();
    let h1 = sector_hamiltonian(sector, params, 0);
    let h2 = sector_hamiltonian(sector, params, 1);
    let mut psi0 = DVector::zeros(h1.nrows());
    psi0[0] = C::new(1.0, 0.0);
    let mut evo = propagate(&[(h1, tau), (h2, tau)], &psi0, cfg)?;
    let stark = match sector {
        Sector::AA => params.stark_phase * 2.0,
        Sector::AB => params.stark_phase,
        Sector::BB => 0.0,
    };
    if stark != 0.0 {
        let rot = C::from_polar(1.0, stark);
        evo.final_state *= rot;
    }
    Ok(evo)
}

/// Detuning ratio and inter-pulse phase of the lossless, perfectly
/// blockaded protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub delta_over_omega: f64,
    pub delta_mhz: f64,
    pub xi: f64,
}

/// Single-pulse propagator of H = [[0, a], [a, −Δ]] over time t.
fn two_level_propagator(a: f64, delta: f64, t: f64) -> [[C; 2]; 2] {
    let w = (delta * delta / 4.0 + a * a).sqrt();
    let (s, c) = (w * t).sin_cos();
    let global = C::from_polar(1.0, delta * t / 2.0);
    let i = C::new(0.0, 1.0);
    let diag_shift = i * (delta / 2.0 / w) * s;
    let off = -i * (a / w) * s;
    [
        [global * (C::new(c, 0.0) - diag_shift), global * off],
        [global * off, global * (C::new(c, 0.0) + diag_shift)],
    ]
}

/// ξ that returns |ab⟩ fully after both pulses, and the resulting ⟨ab|U|ab⟩,
/// for Ω = 1.
fn ab_return(x: f64) -> (f64, C) {
    let omega = 1.0;
    let delta = x * omega;
    let tau = TAU / (2.0 * omega * omega + delta * delta).sqrt();
    let u = two_level_propagator(omega / 2.0, delta, tau);
    // (U_ξ U_0)_{10} = U10 (e^{−iξ} U00 + U11) vanishes for e^{−iξ} = −U11/U00.
    let e_minus_ixi = -u[1][1] / u[0][0];
    let xi = (-e_minus_ixi.arg()).rem_euclid(TAU);
    let amp = u[0][0] * u[0][0] + u[0][1] * u[1][0] * C::from_polar(1.0, xi);
    (xi, amp)
}

fn wrap(phase: f64) -> f64 {
    (phase + PI).rem_euclid(TAU) - PI
}

/// φ_bb − 2φ_ab − π wrapped to (−π, π], at Ω = 1.
fn cz_condition(x: f64) -> f64 {
    let tau = TAU / (2.0 + x * x).sqrt();
    let (_, amp) = ab_return(x);
    wrap(x * tau - 2.0 * amp.arg() - PI)
}

/// Calibrated Δ/Ω: smallest positive root of the CZ phase condition.
pub fn calibrate_ratio() -> Result<(f64, f64)> {
    const SCAN_MAX: f64 = 3.0;
    const SAMPLES: usize = 3000;
    let mut lo = 1e-6;
    let mut f_lo = cz_condition(lo);
    for k in 1..=SAMPLES {
        let hi = SCAN_MAX * k as f64 / SAMPLES as f64;
        let f_hi = cz_condition(hi);
        // A sign change across a 2π wrap has |f| ≈ π on both sides.
        if f_lo.signum() != f_hi.signum() && (f_hi - f_lo).abs() < PI {
            let (mut a, mut b, mut fa) = (lo, hi, f_lo);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = cz_condition(m);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
                if b - a < 1e-15 {
                    break;
                }
            }
            let x = 0.5 * (a + b);
            if cz_condition(x).abs() > 1e-9 {
                return Err(Error::Calibration(format!(
                    "bisection on [{lo}, {hi}] ended at Δ/Ω = {x} with residual {}",
                    cz_condition(x)
                )));
            }
            return Ok((x, ab_return(x).0));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::Calibration(format!(
        "no root of the CZ phase condition for Δ/Ω in (0, {SCAN_MAX}] ({SAMPLES} samples)"
    )))
}

pub fn calibrate(omega_mhz: f64) -> Result<Calibration> {
    if !(omega_mhz.is_finite() && omega_mhz > 0.0) {
        return Err(Error::InvalidArgument(format!("Ω must be positive, got {omega_mhz}")));
    }
    let (ratio, xi) = calibrate_ratio()?;
    Ok(Calibration {
        delta_over_omega: ratio,
        delta_mhz: ratio * omega_mhz,
        xi,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateResult {
    /// Final amplitudes of |aa⟩, |ab⟩, |ba⟩, |bb⟩.
    pub amplitudes: [C; 4],
    /// φ_aa, φ_ab, φ_ba, φ_bb, rad.
    pub phases: [f64; 4],
    /// 1 − |amplitude|² per sector.
    pub leakage: [f64; 4],
    pub fidelity: f64,
}

/// max over single-qubit Z phases of |⟨ψ_CZ|ψ_out⟩|² for the product input
/// (|a⟩+|b⟩)⊗(|a⟩+|b⟩)/2.
pub fn cz_fidelity(c: &[C; 4]) -> f64 {
    let f = |alpha: f64| {
        let e = C::from_polar(1.0, alpha);
        let s = (c[0] - e * c[2]).norm() + (c[1] + e * c[3]).norm();
        s * s / 16.0
    };
    const GRID: usize = 720;
    let (mut best_a, mut best) = (0.0, f(0.0));
    for k in 1..GRID {
        let a = TAU * k as f64 / GRID as f64;
        let v = f(a);
        if v > best {
            best = v;
            best_a = a;
        }
    }
    // Golden-section refinement around the best grid point.
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_a - TAU / GRID as f64, best_a + TAU / GRID as f64);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    best.max(f1).max(f2).clamp(0.0, 1.0)
}

pub fn bell_fidelity(params: &GateParams, cfg: &PropagatorConfig) -> Result<GateResult> {
    let aa = evolve_sector(Sector::AA, params, cfg)?.return_amplitude();
    let ab = evolve_sector(Sector::AB, params, cfg)?.return_amplitude();
    let bb = evolve_sector(Sector::BB, params, cfg)?.return_amplitude();
    let amplitudes = [aa, ab, ab, bb];
    Ok(GateResult {
        amplitudes,
        phases: amplitudes.map(|z| z.arg()),
        leakage: amplitudes.map(|z| 1.0 - z.norm_sqr()),
        fidelity: cz_fidelity(&amplitudes),
    })
}
