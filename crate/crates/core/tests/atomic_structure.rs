mod common;

use rydgate::atomic::{radial_matrix_element, radial_overlap, solve_radial, GridSpec, RadialWavefunction, RydbergLevel};
use rydgate::species::Term;

fn t(s: &str) -> Term {
    s.parse().unwrap()
}

fn wf(n: u32, term: &str, step: f64) -> RadialWavefunction {
    let m = common::rb87();
    let level = RydbergLevel::new(m, n, t(term)).unwrap();
    solve_radial(
        m,
        &level,
        GridSpec {
            step,
            ..GridSpec::default()
        },
    )
    .unwrap()
}

#[test]
fn dipole_element_is_symmetric() {
    let a = wf(70, "s1/2", 0.01);
    let b = wf(69, "p1/2", 0.01);
    let ab = radial_matrix_element(&a, &b).unwrap();
    let ba = radial_matrix_element(&b, &a).unwrap();
    assert!(((ab - ba) / ab).abs() < 1e-12);
    // Circular-orbit scale: n*² ≈ 4500 a0.
    assert!(ab.abs() > 3000.0 && ab.abs() < 6000.0, "{ab}");
}

#[test]
fn dipole_element_scales_as_n_squared() {
    let r70 = radial_matrix_element(&wf(70, "s1/2", 0.01), &wf(69, "p1/2", 0.01)).unwrap();
    let r50 = radial_matrix_element(&wf(50, "s1/2", 0.01), &wf(49, "p1/2", 0.01)).unwrap();
    let expect = (50.0f64 / 70.0).powi(2);
    let ratio = r50 / r70;
    assert!((ratio / expect - 1.0).abs() < 0.1, "{ratio} vs {expect}");
}

#[test]
fn halving_the_step_converges() {
    for (a, b) in [((70, "s1/2"), (69, "p1/2")), ((70, "d3/2"), (71, "p3/2")), ((70, "d3/2"), (68, "f5/2"))] {
        let coarse = radial_matrix_element(&wf(a.0, a.1, 0.01), &wf(b.0, b.1, 0.01)).unwrap();
        let fine = radial_matrix_element(&wf(a.0, a.1, 0.005), &wf(b.0, b.1, 0.005)).unwrap();
        let rel = ((coarse - fine) / fine).abs();
        assert!(rel < 1e-5, "{a:?}-{b:?}: {rel:e}");
    }
}

#[test]
fn same_series_states_are_orthogonal() {
    for term in ["s1/2", "p3/2", "d3/2"] {
        let a = wf(70, term, 0.01);
        for n in [68, 69, 71] {
            let o = radial_overlap(&a, &wf(n, term, 0.01)).unwrap();
            assert!(o.abs() < 1e-3, "{term} 70 vs {n}: {o:e}");
        }
        let self_overlap = radial_overlap(&a, &a).unwrap();
        assert!((self_overlap - 1.0).abs() < 1e-12);
    }
}

#[test]
fn norm_residual_is_reported() {
    let w = wf(70, "s1/2", 0.01);
    assert!(w.norm_residual.is_finite());
    assert_eq!(w.node_count(), 69 - 3);
}
