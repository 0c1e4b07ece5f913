mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rydgate::blockade::Scheme;
use rydgate::pair::{asymmetry, build_hamiltonian, c6_coefficients, diagonalize, pair_basis, C6Options, PairModel};
use rydgate::Error;

fn trace_norm(h: &DMatrix<f64>) -> f64 {
    h.clone().symmetric_eigen().eigenvalues.iter().map(|e| e.abs()).sum()
}

fn swap_permutation(basis: &[(i32, i32)]) -> Vec<usize> {
    basis
        .iter()
        .map(|&(a, b)| basis.iter().position(|&p| p == (b, a)).unwrap())
        .collect()
}

#[test]
fn tight_guard_reports_forster_resonance() {
    let opts = C6Options {
        guard_mhz: 100.0,
        ..C6Options::default()
    };
    let err = c6_coefficients(common::rb87(), 70, Scheme::D.term(), &opts).unwrap_err();
    match err {
        Error::ForsterResonance { defect_mhz, .. } => assert!(defect_mhz.abs() < 100.0),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn hamiltonian_structure() {
    for scheme in [Scheme::S, Scheme::D] {
        let model = common::pair_model(scheme);
        let h = model.hamiltonian(5.0).unwrap();
        assert!(asymmetry(&h) < 1e-14);
        let basis = &model.spectrum.basis;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if basis[i].0 + basis[i].1 != basis[j].0 + basis[j].1 {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
        let p = swap_permutation(basis);
        let scale = h.amax();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                assert!((h[(i, j)] - h[(p[i], p[j])]).abs() <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn spectrum_is_orthonormal_and_reconstructs() {
    for scheme in [Scheme::S, Scheme::D] {
        let model = common::pair_model(scheme);
        let v = &model.spectrum.eigenvectors;
        let gram = v.transpose() * v - DMatrix::identity(v.ncols(), v.ncols());
        assert!(gram.amax() < 1e-10);
        let h = model.hamiltonian(PairModel::REFERENCE_R_UM).unwrap();
        assert!(model.spectrum.reconstruction_residual(&h) < 1e-8 * h.norm());
    }
}

#[test]
fn d_state_is_dominated_by_p_f_channels() {
    let model = common::pair_model(Scheme::D);
    let pf: Vec<_> = model
        .channels
        .iter()
        .filter(|c| c.spec.a.l + c.spec.b.l == 4)
        .cloned()
        .collect();
    assert_eq!(pf.len(), 2);
    let share = trace_norm(&build_hamiltonian(&pf, 5.0).unwrap()) / trace_norm(&model.hamiltonian(5.0).unwrap());
    assert!(share > 0.9, "{share}");
}

#[test]
fn s_state_eigenvalues_share_the_net_sign() {
    let model = common::pair_model(Scheme::S);
    let net: f64 = model.channels.iter().map(|c| c.c6).sum();
    assert!(net > 0.0);
    assert!(model.spectrum.eigenvalues.iter().all(|&e| e > 0.0));
}

#[test]
fn eigenvalues_match_characteristic_roots_per_block() {
    let model = common::pair_model(Scheme::D);
    let h = model.hamiltonian(5.0).unwrap();
    let spectrum = diagonalize(&h, 5.0).unwrap();
    let mut oracle: Vec<f64> = Vec::new();
    for block in common::m_blocks(&pair_basis(3)) {
        let sub = DMatrix::from_fn(block.len(), block.len(), |i, j| h[(block[i], block[j])]);
        oracle.extend(common::characteristic_roots(&sub));
    }
    oracle.sort_by(|a, b| a.total_cmp(b));
    let scale = h.amax();
    for (a, b) in spectrum.eigenvalues.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-8 * scale, "{a} vs {b}");
    }
}

#[test]
fn non_positive_separation_rejected() {
    let model = common::pair_model(Scheme::S);
    assert!(model.hamiltonian(0.0).is_err());
    assert!(model.hamiltonian(-1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_and_channel_linearity(r in 2.0f64..15.0, c1 in -1e4f64..1e4, c2 in -1e4f64..1e4) {
        let mut channels = common::pair_model(Scheme::D).channels[3..5].to_vec();
        channels[0].c6 = c1;
        channels[1].c6 = c2;
        let h = build_hamiltonian(&channels, r).unwrap();
        let h2 = build_hamiltonian(&channels, 2.0 * r).unwrap();
        let scale = h.amax().max(f64::MIN_POSITIVE);
        prop_assert!((&h2 * 64.0 - &h).amax() <= 1e-12 * scale);
        let sum = build_hamiltonian(&channels[..1], r).unwrap() + build_hamiltonian(&channels[1..], r).unwrap();
        prop_assert!((sum - &h).amax() <= 1e-12 * scale);
    }
}
