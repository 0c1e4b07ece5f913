//! Angular momentum coupling coefficients.
//!
//! All angular momenta are passed doubled (`j2 = 2j`, `m2 = 2m`) so that
//! half-integers stay exact. Phase conventions are Condon–Shortley.

use nalgebra::DMatrix;

const FACT_MAX: usize = 64;

fn factorial(n: i64) -> f64 {
    thread_local! {
        static TABLE: [f64; FACT_MAX] = {
            let mut t = [1.0; FACT_MAX];
            for i in 1..FACT_MAX {
                t[i] = t[i - 1] * i as f64;
            }
            t
        };
    }
    assert!((0..FACT_MAX as i64).contains(&n), "factorial argument {n} out of range");
    TABLE.with(|t| t[n as usize])
}

fn is_even(x: i64) -> bool {
    x.rem_euclid(2) == 0
}

/// Halves a doubled quantity that is known to be even.
fn half(x: i64) -> i64 {
    debug_assert!(is_even(x));
    x / 2
}

fn triangle(a2: i64, b2: i64, c2: i64) -> bool {
    c2 >= (a2 - b2).abs() && c2 <= a2 + b2 && is_even(a2 + b2 + c2)
}

/// Δ(abc) with doubled arguments.
fn delta(a2: i64, b2: i64, c2: i64) -> f64 {
    (factorial(half(a2 + b2 - c2)) * factorial(half(a2 - b2 + c2)) * factorial(half(-a2 + b2 + c2))
        / factorial(half(a2 + b2 + c2) + 1))
        .sqrt()
}

fn projection_ok(j2: i64, m2: i64) -> bool {
    m2.abs() <= j2 && is_even(j2 - m2)
}

/// Clebsch–Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩.
pub fn clebsch_gordan(j1: u32, m1: i32, j2: u32, m2: i32, jj: u32, mm: i32) -> f64 {
    let (j1, m1, j2, m2, jj, mm) = (
        i64::from(j1),
        i64::from(m1),
        i64::from(j2),
        i64::from(m2),
        i64::from(jj),
        i64::from(mm),
    );
    if m1 + m2 != mm
        || !triangle(j1, j2, jj)
        || !projection_ok(j1, m1)
        || !projection_ok(j2, m2)
        || !projection_ok(jj, mm)
    {
        return 0.0;
    }
    let pre = ((jj + 1) as f64
        * factorial(half(j1 + j2 - jj))
        * factorial(half(j1 - j2 + jj))
        * factorial(half(-j1 + j2 + jj))
        / factorial(half(j1 + j2 + jj) + 1))
        .sqrt();
    let pre = pre
        * (factorial(half(j1 + m1))
            * factorial(half(j1 - m1))
            * factorial(half(j2 + m2))
            * factorial(half(j2 - m2))
            * factorial(half(jj + mm))
            * factorial(half(jj - mm)))
        .sqrt();

    let kmin = 0.max(half(j2 - jj - m1)).max(half(j1 - jj + m2));
    let kmax = half(j1 + j2 - jj).min(half(j1 - m1)).min(half(j2 + m2));
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(half(j1 + j2 - jj) - k)
            * factorial(half(j1 - m1) - k)
            * factorial(half(j2 + m2) - k)
            * factorial(half(jj - j2 + m1) + k)
            * factorial(half(jj - j1 - m2) + k);
        let sign = if is_even(k) { 1.0 } else { -1.0 };
        sum += sign / den;
    }
    pre * sum
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner_3j(j1: u32, j2: u32, j3: u32, m1: i32, m2: i32, m3: i32) -> f64 {
    let phase = i64::from(j1) - i64::from(j2) - i64::from(m3);
    if !is_even(phase) {
        return 0.0;
    }
    let sign = if is_even(half(phase)) { 1.0 } else { -1.0 };
    sign / f64::from(j3 + 1).sqrt() * clebsch_gordan(j1, m1, j2, m2, j3, -m3)
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
pub fn wigner_6j(j1: u32, j2: u32, j3: u32, j4: u32, j5: u32, j6: u32) -> f64 {
    let [a, b, c, d, e, f] = [j1, j2, j3, j4, j5, j6].map(i64::from);
    if !(triangle(a, b, c) && triangle(a, e, f) && triangle(d, b, f) && triangle(d, e, c)) {
        return 0.0;
    }
    let pre = delta(a, b, c) * delta(a, e, f) * delta(d, b, f) * delta(d, e, c);
    let t1 = half(a + b + c);
    let t2 = half(a + e + f);
    let t3 = half(d + b + f);
    let t4 = half(d + e + c);
    let s1 = half(a + b + d + e);
    let s2 = half(b + c + e + f);
    let s3 = half(a + c + d + f);
    let kmin = t1.max(t2).max(t3).max(t4);
    let kmax = s1.min(s2).min(s3);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = factorial(k - t1)
            * factorial(k - t2)
            * factorial(k - t3)
            * factorial(k - t4)
            * factorial(s1 - k)
            * factorial(s2 - k)
            * factorial(s3 - k);
        let sign = if is_even(k) { 1.0 } else { -1.0 };
        sum += sign * factorial(k + 1) / den;
    }
    pre * sum
}

/// Wigner small-d element d^j_{m' m}(β) = ⟨j m'| exp(−iβJ_y) |j m⟩.
pub fn wigner_small_d(j2: u32, mp2: i32, m2: i32, beta: f64) -> f64 {
    let (j, mp, m) = (i64::from(j2), i64::from(mp2), i64::from(m2));
    if !projection_ok(j, mp) || !projection_ok(j, m) {
        return 0.0;
    }
    let pre = (factorial(half(j + mp)) * factorial(half(j - mp)) * factorial(half(j + m)) * factorial(half(j - m)))
        .sqrt();
    let (s, c) = (beta / 2.0).sin_cos();
    let kmin = 0.max(half(m - mp));
    let kmax = half(j + m).min(half(j - mp));
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let den = factorial(half(j + m) - k)
            * factorial(k)
            * factorial(half(j - mp) - k)
            * factorial(half(mp - m) + k);
        let sign = if is_even(half(mp - m) + k) { 1.0 } else { -1.0 };
        let pc = (half(2 * j + m - mp) - 2 * k) as i32;
        let ps = (half(mp - m) + 2 * k) as i32;
        sum += sign * c.powi(pc) * s.powi(ps) / den;
    }
    pre * sum
}

/// Projections of a multiplet in basis order m = +j, j−1, …, −j (doubled).
pub fn projections(j2: u32) -> Vec<i32> {
    (0..=j2).map(|k| j2 as i32 - 2 * k as i32).collect()
}

/// Full rotation matrix d^j(β) in the [`projections`] basis order.
pub fn wigner_d_matrix(j2: u32, beta: f64) -> DMatrix<f64> {
    let ms = projections(j2);
    DMatrix::from_fn(ms.len(), ms.len(), |a, b| wigner_small_d(j2, ms[a], ms[b], beta))
}

/// Per-atom angular weight of the dipole transition (l j) → (l' j'):
/// |⟨l' j'‖C¹‖l j⟩|² / (2j' + 1). Multiplying by a Clebsch–Gordan
/// coefficient squared gives |⟨l' j' m'|C¹_p|l j m⟩|².
pub fn reduced_dipole_factor(l: u32, j2: u32, lp: u32, jp2: u32) -> f64 {
    let three = wigner_3j(2 * lp, 2, 2 * l, 0, 0, 0);
    let six = wigner_6j(2 * lp, jp2, 1, j2, 2 * l, 2);
    f64::from((j2 + 1) * (2 * l + 1) * (2 * lp + 1)) * three * three * six * six
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Complex, DMatrix};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn cg_known_values() {
        // ⟨½ ½; ½ −½ | 1 0⟩ = 1/√2, ⟨½ ½; ½ −½ | 0 0⟩ = 1/√2
        assert!(close(clebsch_gordan(1, 1, 1, -1, 2, 0), FRAC_1_SQRT_2, 1e-14));
        assert!(close(clebsch_gordan(1, 1, 1, -1, 0, 0), FRAC_1_SQRT_2, 1e-14));
        assert!(close(clebsch_gordan(1, -1, 1, 1, 0, 0), -FRAC_1_SQRT_2, 1e-14));
        // ⟨1 0; 1 0 | 2 0⟩ = √(2/3), ⟨1 0; 1 0 | 1 0⟩ = 0
        assert!(close(clebsch_gordan(2, 0, 2, 0, 4, 0), (2.0f64 / 3.0).sqrt(), 1e-14));
        assert!(close(clebsch_gordan(2, 0, 2, 0, 2, 0), 0.0, 1e-14));
        // ⟨½ ½; 1 1 | 3/2 3/2⟩ = 1, ⟨½ −½; 1 1 | ½ ½⟩ = −√(2/3)
        assert!(close(clebsch_gordan(1, 1, 2, 2, 3, 3), 1.0, 1e-14));
        assert!(close(clebsch_gordan(1, -1, 2, 2, 1, 1), -(2.0f64 / 3.0).sqrt(), 1e-14));
        assert_eq!(clebsch_gordan(1, 1, 1, 1, 0, 0), 0.0);
    }

    #[test]
    fn cg_orthonormal() {
        for (j1, j2) in [(3u32, 2u32), (5, 2), (4, 2), (7, 2)] {
            for jj in ((j1 as i32 - j2 as i32).unsigned_abs()..=j1 + j2).step_by(2) {
                for jp in ((j1 as i32 - j2 as i32).unsigned_abs()..=j1 + j2).step_by(2) {
                    for mm in projections(jj.min(jp)) {
                        let mut s = 0.0;
                        for m1 in projections(j1) {
                            let m2 = mm - m1;
                            s += clebsch_gordan(j1, m1, j2, m2, jj, mm) * clebsch_gordan(j1, m1, j2, m2, jp, mm);
                        }
                        let expect = if jj == jp { 1.0 } else { 0.0 };
                        assert!(close(s, expect, 1e-12), "{j1} {j2} {jj} {jp} {mm}: {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn six_j_known_values() {
        // {1 1 1; 1 1 1} = 1/6, {½ ½ 1; ½ ½ 0} = 1/2
        assert!(close(wigner_6j(2, 2, 2, 2, 2, 2), 1.0 / 6.0, 1e-14));
        assert!(close(wigner_6j(1, 1, 2, 1, 1, 0), 0.5, 1e-14));
        // {a b c; 0 c b} = (−1)^{a+b+c}/√((2b+1)(2c+1))
        assert!(close(wigner_6j(2, 1, 1, 0, 1, 1), 1.0 / 2.0, 1e-14));
        assert!(close(wigner_6j(4, 2, 2, 0, 2, 2), 1.0 / 3.0, 1e-14));
        assert!(close(wigner_6j(3, 2, 3, 0, 3, 2), 1.0 / 12.0f64.sqrt(), 1e-14));
    }

    #[test]
    fn reduced_factors() {
        assert!(close(reduced_dipole_factor(0, 1, 1, 1), 1.0 / 3.0, 1e-14));
        assert!(close(reduced_dipole_factor(0, 1, 1, 3), 1.0 / 3.0, 1e-14));
        assert!(close(reduced_dipole_factor(2, 3, 1, 1), 2.0 / 3.0, 1e-14));
        assert!(close(reduced_dipole_factor(2, 3, 1, 3), 1.0 / 15.0, 1e-14));
        assert!(close(reduced_dipole_factor(2, 3, 3, 5), 2.0 / 5.0, 1e-14));
        assert_eq!(reduced_dipole_factor(2, 3, 3, 7), 0.0);
    }

    #[test]
    fn small_d_spin_half() {
        let b = 0.7;
        let d = wigner_d_matrix(1, b);
        let (s, c) = (b / 2.0).sin_cos();
        assert!(close(d[(0, 0)], c, 1e-15));
        assert!(close(d[(0, 1)], -s, 1e-15));
        assert!(close(d[(1, 0)], s, 1e-15));
        assert!(close(d[(1, 1)], c, 1e-15));
    }

    #[test]
    fn small_d_matches_generator_exponential() {
        for j2 in [1u32, 2, 3, 5] {
            let ms = projections(j2);
            let n = ms.len();
            let j = f64::from(j2) / 2.0;
            let mut jy = DMatrix::<Complex<f64>>::zeros(n, n);
            for b in 0..n {
                let m = f64::from(ms[b]) / 2.0;
                if b > 0 {
                    let up = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
                    jy[(b - 1, b)] += Complex::new(0.0, -up / 2.0);
                    jy[(b, b - 1)] += Complex::new(0.0, up / 2.0);
                }
            }
            for beta in [0.3, PI / 2.0, 2.1] {
                let gen = jy.map(|z| z * Complex::new(0.0, -beta));
                let oracle = gen.exp();
                let d = wigner_d_matrix(j2, beta);
                for a in 0..n {
                    for b in 0..n {
                        assert!((oracle[(a, b)] - Complex::new(d[(a, b)], 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
    }
}
