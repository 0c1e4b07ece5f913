use std::ffi::{CStr, CString};
use std::ptr;

use rydgate_ffi::*;

fn last_error() -> String {
    let p = rg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn rb87() -> *mut RgSpecies {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rg_species_rb87(&mut s) }, RgStatus::Ok);
    s
}

#[test]
fn species_round_trip_through_handles() {
    let s = rb87();
    let mut e = 0.0;
    assert_eq!(unsafe { rg_level_energy(s, 70, 0, 1, &mut e) }, RgStatus::Ok);
    assert!(e < 0.0 && e > -1000.0, "{e}");
    assert_eq!(unsafe { rg_level_energy(s, 70, 0, 3, &mut e) }, RgStatus::InvalidArgument);
    assert!(last_error().contains("quantum numbers"));
    unsafe { rg_species_free(s) };
    unsafe { rg_species_free(ptr::null_mut()) };
}

#[test]
fn species_loading_errors_map_to_codes() {
    let mut s = ptr::null_mut();
    let missing = CString::new("/nonexistent/species.toml").unwrap();
    assert_eq!(unsafe { rg_species_load(missing.as_ptr(), &mut s) }, RgStatus::Io);
    let bad = CString::new("name = \"X\"\nbogus = 1\n").unwrap();
    assert_eq!(unsafe { rg_species_from_toml(bad.as_ptr(), &mut s) }, RgStatus::SpeciesData);
    assert!(s.is_null());
    assert_eq!(unsafe { rg_species_load(ptr::null(), &mut s) }, RgStatus::NullPointer);
    let path = CString::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/hydrogen.toml")).unwrap();
    assert_eq!(unsafe { rg_species_load(path.as_ptr(), &mut s) }, RgStatus::Ok);
    unsafe { rg_species_free(s) };
}

#[test]
fn pair_model_channels_and_shift() {
    let s = rb87();
    let mut pair = ptr::null_mut();
    assert_eq!(unsafe { rg_pair_model_new(s, 70, RgScheme::S, &mut pair) }, RgStatus::Ok);
    unsafe { rg_species_free(s) };

    let mut count = 0usize;
    assert_eq!(unsafe { rg_pair_model_channel_count(pair, &mut count) }, RgStatus::Ok);
    assert_eq!(count, 3);
    let mut c6 = 0.0;
    assert_eq!(unsafe { rg_pair_model_channel_c6(pair, 0, &mut c6) }, RgStatus::Ok);
    assert!(c6 > 0.0);
    assert_eq!(unsafe { rg_pair_model_channel_c6(pair, 3, &mut c6) }, RgStatus::InvalidArgument);

    let mut buf = [0 as std::ffi::c_char; 16];
    assert_eq!(unsafe { rg_pair_model_channel_label(pair, 0, buf.as_mut_ptr(), buf.len()) }, RgStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), "p1/2+p1/2");
    assert_eq!(
        unsafe { rg_pair_model_channel_label(pair, 0, buf.as_mut_ptr(), 4) },
        RgStatus::BufferTooSmall
    );

    let (mut d5, mut d10, mut signed) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { rg_blockade_shift(pair, 5.0, 0.0, &mut d5, &mut signed) }, RgStatus::Ok);
    assert_eq!(unsafe { rg_blockade_shift(pair, 10.0, 0.0, &mut d10, ptr::null_mut()) }, RgStatus::Ok);
    assert!((d5 / d10 - 64.0).abs() < 1e-9);
    assert_eq!(signed.abs(), d5);
    assert_eq!(unsafe { rg_blockade_shift(pair, 5.0, 4.0, &mut d5, ptr::null_mut()) }, RgStatus::InvalidArgument);
    unsafe { rg_pair_model_free(pair) };
}

#[test]
fn gate_functions() {
    let (mut delta, mut xi) = (0.0, 0.0);
    assert_eq!(unsafe { rg_calibrate(7.0, &mut delta, &mut xi) }, RgStatus::Ok);
    assert!((delta / 7.0 - 0.377).abs() < 1e-3 && (xi - 3.902).abs() < 1e-3);
    let mut tau = 0.0;
    assert_eq!(unsafe { rg_pulse_duration(7.0, delta, &mut tau) }, RgStatus::Ok);

    let mut params = RgGateParams {
        omega_mhz: 0.0,
        delta_mhz: 0.0,
        xi: 0.0,
        tau_ns: 0.0,
        delta_r_mhz: 0.0,
        gamma_r: 0.0,
        stark_phase: 0.0,
        perfect_blockade: 0,
    };
    assert_eq!(unsafe { rg_gate_params_calibrated(7.0, 0.0, 0.0, 1, &mut params) }, RgStatus::Ok);
    assert_eq!(params.tau_ns, tau);
    let mut f = 0.0;
    assert_eq!(unsafe { rg_bell_fidelity(&params, &mut f) }, RgStatus::Ok);
    assert!(f > 0.9999);

    params.perfect_blockade = 0;
    params.delta_r_mhz = 30.0;
    assert_eq!(unsafe { rg_bell_fidelity(&params, &mut f) }, RgStatus::Ok);
    assert!(f < 0.9999 && f > 0.9);

    assert_eq!(unsafe { rg_calibrate(-1.0, &mut delta, &mut xi) }, RgStatus::InvalidArgument);
    assert_eq!(unsafe { rg_bell_fidelity(ptr::null(), &mut f) }, RgStatus::NullPointer);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rydgate.h")).unwrap();
    for name in [
        "rg_last_error_message",
        "rg_species_load",
        "rg_species_from_toml",
        "rg_species_rb87",
        "rg_species_free",
        "rg_level_energy",
        "rg_pair_model_new",
        "rg_pair_model_free",
        "rg_pair_model_channel_count",
        "rg_pair_model_channel_c6",
        "rg_pair_model_channel_label",
        "rg_blockade_shift",
        "rg_calibrate",
        "rg_pulse_duration",
        "rg_gate_params_calibrated",
        "rg_bell_fidelity",
        "typedef struct RgSpecies RgSpecies",
        "typedef struct RgPairModel RgPairModel",
        "RG_STATUS_FORSTER_RESONANCE",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
