#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rydgate::blockade::Scheme;
use rydgate::pair::{C6Options, PairModel};
use rydgate::SpeciesModel;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn rb87_source() -> String {
    std::fs::read_to_string(data_path("rb87.toml")).unwrap()
}

pub fn rb87() -> &'static SpeciesModel {
    static M: OnceLock<SpeciesModel> = OnceLock::new();
    M.get_or_init(|| SpeciesModel::load(data_path("rb87.toml")).unwrap())
}

pub fn pair_model(scheme: Scheme) -> &'static PairModel {
    static S: OnceLock<PairModel> = OnceLock::new();
    static D: OnceLock<PairModel> = OnceLock::new();
    let cell = match scheme {
        Scheme::S => &S,
        Scheme::D => &D,
    };
    cell.get_or_init(|| PairModel::new(rb87(), 70, scheme.term(), &C6Options::default()).unwrap())
}

/// Indices of the pair basis grouped by total projection M.
pub fn m_blocks(basis: &[(i32, i32)]) -> Vec<Vec<usize>> {
    let mut ms: Vec<i32> = basis.iter().map(|(a, b)| a + b).collect();
    ms.sort();
    ms.dedup();
    ms.iter()
        .map(|&m| (0..basis.len()).filter(|&i| basis[i].0 + basis[i].1 == m).collect())
        .collect()
}

/// Eigenvalues of a small real matrix as roots of its characteristic
/// polynomial (Faddeev–LeVerrier coefficients, companion-matrix roots).
pub fn characteristic_roots(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let a = a / scale;
    // coeffs[k] multiplies λ^k; monic.
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = &a * &m + DMatrix::identity(n, n) * coeffs[n - k + 1];
        coeffs[n - k] = -(&a * &m).trace() / k as f64;
    }
    if n == 1 {
        return vec![-coeffs[0] * scale];
    }
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -coeffs[i];
    }
    let mut roots: Vec<f64> = companion.complex_eigenvalues().iter().map(|z| z.re * scale).collect();
    roots.sort_by(|x, y| x.total_cmp(y));
    roots
}
