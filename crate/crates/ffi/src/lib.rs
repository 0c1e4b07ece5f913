//! C ABI over the rydgate pipeline.
//!
//! Every function returns an [`RgStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`rg_last_error_message`]. Species and pair models are opaque handles
//! released with their `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rydgate::atomic::level_energy;
use rydgate::blockade::{blockade_shift, bright_pair_state, Scheme};
use rydgate::gate::{bell_fidelity, calibrate, pulse_duration, BlockadeMode, GateParams, PropagatorConfig};
use rydgate::pair::{C6Options, PairModel};
use rydgate::species::RB87_TOML;
use rydgate::{Error, SpeciesModel, Term};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    SpeciesData = 4,
    Numerics = 5,
    ForsterResonance = 6,
    Calibration = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RgScheme {
    /// 70s1/2-type excitation.
    S = 0,
    /// 70d3/2-type excitation.
    D = 1,
}

/// Gate parameters; frequencies are Ω/2π in MHz, γ in 1/μs, τ in ns.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RgGateParams {
    pub omega_mhz: f64,
    pub delta_mhz: f64,
    pub xi: f64,
    pub tau_ns: f64,
    pub delta_r_mhz: f64,
    pub gamma_r: f64,
    pub stark_phase: f64,
    /// Nonzero drops the doubly excited state.
    pub perfect_blockade: i32,
}

/// Opaque species handle.
pub struct RgSpecies(SpeciesModel);

/// Opaque pair-interaction handle for one initial state.
pub struct RgPairModel {
    model: PairModel,
    scheme: Scheme,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RgStatus {
    match err {
        Error::Io { .. } => RgStatus::Io,
        Error::Schema(_) | Error::DefectOrdering(_) => RgStatus::SpeciesData,
        Error::ForsterResonance { .. } | Error::ForsterZero { .. } => RgStatus::ForsterResonance,
        Error::Calibration(_) => RgStatus::Calibration,
        Error::GridTooCoarse { .. }
        | Error::Integration { .. }
        | Error::Grid(_)
        | Error::NotHermitian(_)
        | Error::StepTooLarge { .. } => RgStatus::Numerics,
        Error::QuantumNumbers(_) | Error::InvalidArgument(_) | Error::Config(_) | Error::Output(_) => {
            RgStatus::InvalidArgument
        }
    }
}

struct Failure(RgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RgStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RgStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RgStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn term(l: u32, j2: u32) -> Result<Term, Failure> {
    Ok(Term::new(l, j2)?)
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a species TOML file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_species_load(path: *const c_char, out: *mut *mut RgSpecies) -> RgStatus {
    guard(|| {
        let path = string(path, "path")?;
        let model = SpeciesModel::load(path)?;
        write(out, Box::into_raw(Box::new(RgSpecies(model))), "out")
    })
}

/// Parses species TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_species_from_toml(toml: *const c_char, out: *mut *mut RgSpecies) -> RgStatus {
    guard(|| {
        let text = string(toml, "toml")?;
        let model = SpeciesModel::from_toml_str(text)?;
        write(out, Box::into_raw(Box::new(RgSpecies(model))), "out")
    })
}

/// The bundled Rb87 table.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_species_rb87(out: *mut *mut RgSpecies) -> RgStatus {
    guard(|| {
        let model = SpeciesModel::from_toml_str(RB87_TOML)?;
        write(out, Box::into_raw(Box::new(RgSpecies(model))), "out")
    })
}

/// # Safety
/// `species` must come from an `rg_species_*` constructor and not be used
/// afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn rg_species_free(species: *mut RgSpecies) {
    if !species.is_null() {
        drop(Box::from_raw(species));
    }
}

/// Level energy in GHz below the ionization limit (negative), for orbital
/// l and doubled total angular momentum j2.
///
/// # Safety
/// `species` must be a live handle; `out_ghz` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_level_energy(
    species: *const RgSpecies,
    n: u32,
    l: u32,
    j2: u32,
    out_ghz: *mut f64,
) -> RgStatus {
    guard(|| {
        let species = borrow(species, "species")?;
        let e = level_energy(&species.0, n, term(l, j2)?)?;
        write(out_ghz, e, "out_ghz")
    })
}

/// Channels, C6 coefficients and pair spectrum for nl_j + nl_j with the
/// default C6 options.
///
/// # Safety
/// `species` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_pair_model_new(
    species: *const RgSpecies,
    n: u32,
    scheme: RgScheme,
    out: *mut *mut RgPairModel,
) -> RgStatus {
    guard(|| {
        let species = borrow(species, "species")?;
        let scheme = match scheme {
            RgScheme::S => Scheme::S,
            RgScheme::D => Scheme::D,
        };
        let model = PairModel::new(&species.0, n, scheme.term(), &C6Options::default())?;
        write(out, Box::into_raw(Box::new(RgPairModel { model, scheme })), "out")
    })
}

/// # Safety
/// `pair` must come from `rg_pair_model_new` and not be used afterwards.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn rg_pair_model_free(pair: *mut RgPairModel) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_pair_model_channel_count(pair: *const RgPairModel, out: *mut usize) -> RgStatus {
    guard(|| {
        let pair = borrow(pair, "pair")?;
        write(out, pair.model.channels.len(), "out")
    })
}

/// Signed C6 of channel `index` in GHz·μm⁶.
///
/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_pair_model_channel_c6(pair: *const RgPairModel, index: usize, out: *mut f64) -> RgStatus {
    guard(|| {
        let pair = borrow(pair, "pair")?;
        let ch = pair.model.channels.get(index).ok_or_else(|| {
            Failure(
                RgStatus::InvalidArgument,
                format!("channel {index} out of range ({} channels)", pair.model.channels.len()),
            )
        })?;
        write(out, ch.c6, "out")
    })
}

/// Writes the NUL-terminated label of channel `index` (e.g. "p1/2+p3/2")
/// into `buf`. Returns `RG_STATUS_BUFFER_TOO_SMALL` if `len` cannot hold it.
///
/// # Safety
/// `pair` must be a live handle; `buf` must have room for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rg_pair_model_channel_label(
    pair: *const RgPairModel,
    index: usize,
    buf: *mut c_char,
    len: usize,
) -> RgStatus {
    guard(|| {
        let pair = borrow(pair, "pair")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let ch = pair
            .model
            .channels
            .get(index)
            .ok_or_else(|| Failure(RgStatus::InvalidArgument, format!("channel {index} out of range")))?;
        let label = ch.spec.label();
        if label.len() + 1 > len {
            return Err(Failure(
                RgStatus::BufferTooSmall,
                format!("label needs {} bytes", label.len() + 1),
            ));
        }
        ptr::copy_nonoverlapping(label.as_ptr().cast::<c_char>(), buf, label.len());
        buf.add(label.len()).write(0);
        Ok(())
    })
}

/// Mean blockade shift of the bright pair state in MHz at separation
/// `r_um` and angle `theta` ∈ [0, π]. `out_signed_mhz` may be NULL.
///
/// # Safety
/// `pair` must be a live handle; `out_mhz` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_blockade_shift(
    pair: *const RgPairModel,
    r_um: f64,
    theta: f64,
    out_mhz: *mut f64,
    out_signed_mhz: *mut f64,
) -> RgStatus {
    guard(|| {
        let pair = borrow(pair, "pair")?;
        let res = blockade_shift(&pair.model.spectrum, &bright_pair_state(pair.scheme), r_um, theta)?;
        write(out_mhz, res.delta_r_mhz, "out_mhz")?;
        if !out_signed_mhz.is_null() {
            out_signed_mhz.write(res.signed_delta_r_mhz);
        }
        Ok(())
    })
}

/// Calibrated Δ/2π (MHz) and ξ (rad) for Ω/2π = `omega_mhz`.
///
/// # Safety
/// Both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_calibrate(omega_mhz: f64, out_delta_mhz: *mut f64, out_xi: *mut f64) -> RgStatus {
    guard(|| {
        let cal = calibrate(omega_mhz)?;
        write(out_delta_mhz, cal.delta_mhz, "out_delta_mhz")?;
        write(out_xi, cal.xi, "out_xi")
    })
}

/// Single-pulse duration τ in ns.
///
/// # Safety
/// `out_ns` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_pulse_duration(omega_mhz: f64, delta_mhz: f64, out_ns: *mut f64) -> RgStatus {
    guard(|| write(out_ns, pulse_duration(omega_mhz, delta_mhz)?, "out_ns"))
}

/// Fills `out` with calibrated parameters for the given drive and shift.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_gate_params_calibrated(
    omega_mhz: f64,
    delta_r_mhz: f64,
    gamma_r: f64,
    perfect_blockade: i32,
    out: *mut RgGateParams,
) -> RgStatus {
    guard(|| {
        let mode = if perfect_blockade != 0 {
            BlockadeMode::Perfect
        } else {
            BlockadeMode::Finite
        };
        let p = GateParams::calibrated(omega_mhz, delta_r_mhz, gamma_r, mode)?;
        write(
            out,
            RgGateParams {
                omega_mhz: p.omega_mhz,
                delta_mhz: p.delta_mhz,
                xi: p.xi,
                tau_ns: p.tau_ns,
                delta_r_mhz: p.delta_r_mhz,
                gamma_r: p.gamma_r,
                stark_phase: p.stark_phase,
                perfect_blockade,
            },
            "out",
        )
    })
}

/// Bell-state fidelity of the two-pulse gate.
///
/// # Safety
/// `params` must point to a valid struct; `out_fidelity` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rg_bell_fidelity(params: *const RgGateParams, out_fidelity: *mut f64) -> RgStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        let params = GateParams {
            omega_mhz: p.omega_mhz,
            delta_mhz: p.delta_mhz,
            xi: p.xi,
            tau_ns: p.tau_ns,
            delta_r_mhz: p.delta_r_mhz,
            gamma_r: p.gamma_r,
            stark_phase: p.stark_phase,
            mode: if p.perfect_blockade != 0 {
                BlockadeMode::Perfect
            } else {
                BlockadeMode::Finite
            },
        };
        let r = bell_fidelity(&params, &PropagatorConfig::default())?;
        write(out_fidelity, r.fidelity, "out_fidelity")
    })
}
