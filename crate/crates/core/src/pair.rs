//! Van der Waals interaction of two identical Rydberg atoms.
//!
//! Each dipole-allowed channel nlj + nlj → n_A l_A j_A + n_B l_B j_B
//! contributes C6/R⁶ times an angular dyad operator acting on the Zeeman
//! space of the initial pair. The interatomic axis is the quantization axis.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::angular::{clebsch_gordan, projections, reduced_dipole_factor};
use crate::atomic::{radial_matrix_element, solve_radial, GridSpec, RadialWavefunction, RydbergLevel};
use crate::error::{Error, Result};
use crate::species::{SpeciesModel, Term};
use crate::units::{c6_atomic_unit, HARTREE_GHZ, MHZ_PER_GHZ};

/// Angular content of a channel: the two intermediate series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChannelSpec {
    pub initial: Term,
    pub a: Term,
    pub b: Term,
}

impl ChannelSpec {
    pub fn is_symmetric(&self) -> bool {
        self.a == self.b
    }

    pub fn label(&self) -> String {
        format!("{}+{}", self.a, self.b)
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.a, self.b)
    }
}

fn j_distance(a: Term, b: Term) -> u32 {
    a.j2.abs_diff(b.j2)
}

/// Dipole partners of `initial`: |Δl| = 1, |Δj| ≤ 1.
pub fn dipole_partners(initial: Term) -> Vec<Term> {
    let mut out = Vec::new();
    for lp in [initial.l.checked_sub(1), Some(initial.l + 1)].into_iter().flatten() {
        for jp2 in [2 * lp + 1, (2 * lp).wrapping_sub(1)] {
            if lp == 0 && jp2 != 1 {
                continue;
            }
            if j_distance(initial, Term { l: lp, j2: jp2 }) <= 2 {
                out.push(Term { l: lp, j2: jp2 });
            }
        }
    }
    out
}

/// All channels of `initial`, each unordered partner pair listed once.
///
/// Channels are ordered by l_A + l_B, then by the total j change. Within a
/// channel, A is the partner with lower l, then the one with j closer to
/// the initial j.
pub fn enumerate_channels(initial: Term) -> Vec<ChannelSpec> {
    let mut partners = dipole_partners(initial);
    partners.sort_by_key(|t| (t.l, j_distance(initial, *t)));
    let mut channels = Vec::new();
    for (i, &a) in partners.iter().enumerate() {
        for &b in &partners[i..] {
            channels.push(ChannelSpec { initial, a, b });
        }
    }
    channels.sort_by_key(|c| {
        (
            c.a.l + c.b.l,
            j_distance(initial, c.a) + j_distance(initial, c.b),
        )
    });
    channels
}

/// One (n_A, n_B) term of a C6 sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTerm {
    pub n_a: u32,
    pub n_b: u32,
    /// δ_AB = E_A + E_B − 2E, GHz.
    pub defect_ghz: f64,
    /// R_A·R_B, a0².
    pub radial_product: f64,
    /// Contribution to C6, GHz·μm⁶.
    pub c6: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InteractionChannel {
    pub spec: ChannelSpec,
    /// Principal quantum number of the initial state.
    pub n: u32,
    /// GHz·μm⁶.
    pub c6: f64,
    /// Retained terms, sorted by decreasing |contribution|.
    pub pair_terms: Vec<PairTerm>,
}

impl InteractionChannel {
    /// Smallest retained |δ_AB|, GHz.
    pub fn min_defect_ghz(&self) -> Option<f64> {
        self.pair_terms
            .iter()
            .map(|t| t.defect_ghz.abs())
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Fraction of Σ|contribution| carried by the two largest terms.
    pub fn dominance(&self) -> f64 {
        let total: f64 = self.pair_terms.iter().map(|t| t.c6.abs()).sum();
        if total == 0.0 {
            return 1.0;
        }
        self.pair_terms.iter().take(2).map(|t| t.c6.abs()).sum::<f64>() / total
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct C6Options {
    /// Intermediate n ranges over n ± n_window.
    pub n_window: u32,
    /// Terms with |δ_AB| above this are dropped; `None` keeps the whole window.
    pub defect_cutoff_ghz: Option<f64>,
    /// A retained |δ_AB| below this is a Förster resonance.
    pub guard_mhz: f64,
    pub grid: GridSpec,
}

impl Default for C6Options {
    fn default() -> Self {
        C6Options {
            n_window: 4,
            defect_cutoff_ghz: Some(15.0),
            guard_mhz: 10.0,
            grid: GridSpec::default(),
        }
    }
}

/// Solved wavefunctions keyed by (n, term).
pub struct WavefunctionCache<'a> {
    model: &'a SpeciesModel,
    grid: GridSpec,
    map: HashMap<(u32, Term), RadialWavefunction>,
}

impl<'a> WavefunctionCache<'a> {
    pub fn new(model: &'a SpeciesModel, grid: GridSpec) -> Self {
        WavefunctionCache {
            model,
            grid,
            map: HashMap::new(),
        }
    }

    /// Solves all missing levels in parallel.
    pub fn prefetch(&mut self, levels: impl IntoIterator<Item = (u32, Term)>) -> Result<()> {
        let missing: BTreeSet<(u32, Term)> = levels.into_iter().filter(|k| !self.map.contains_key(k)).collect();
        let (model, grid) = (self.model, self.grid);
        let solved: Vec<_> = missing
            .into_par_iter()
            .map(|(n, t)| {
                let level = RydbergLevel::new(model, n, t)?;
                Ok(((n, t), solve_radial(model, &level, grid)?))
            })
            .collect::<Result<_>>()?;
        self.map.extend(solved);
        Ok(())
    }

    /// A previously solved wavefunction.
    pub fn get(&self, n: u32, term: Term) -> Result<&RadialWavefunction> {
        self.map
            .get(&(n, term))
            .ok_or_else(|| Error::InvalidArgument(format!("{n}{term} has not been solved")))
    }
}

fn window(n: u32, term: Term, w: u32) -> impl Iterator<Item = u32> {
    n.saturating_sub(w).max(term.l + 1)..=n + w
}

/// C6 of one channel by the second-order sum over intermediate pairs
/// within the n window.
///
/// Symmetric channels sum over unordered {n_A, n_B}; asymmetric channels
/// over all (n_A, n_B).
pub fn c6_coefficient(
    cache: &mut WavefunctionCache<'_>,
    n: u32,
    spec: ChannelSpec,
    opts: &C6Options,
) -> Result<InteractionChannel> {
    let model = cache.model;
    let e0 = RydbergLevel::new(model, n, spec.initial)?.energy_ghz;
    let needed: Vec<(u32, Term)> = std::iter::once((n, spec.initial))
        .chain(window(n, spec.a, opts.n_window).map(|k| (k, spec.a)))
        .chain(window(n, spec.b, opts.n_window).map(|k| (k, spec.b)))
        .collect();
    cache.prefetch(needed)?;

    let mut terms = Vec::new();
    for n_a in window(n, spec.a, opts.n_window) {
        for n_b in window(n, spec.b, opts.n_window) {
            if spec.is_symmetric() && n_b < n_a {
                continue;
            }
            let e_a = RydbergLevel::new(model, n_a, spec.a)?.energy_ghz;
            let e_b = RydbergLevel::new(model, n_b, spec.b)?.energy_ghz;
            let defect = e_a + e_b - 2.0 * e0;
            if let Some(cut) = opts.defect_cutoff_ghz {
                if defect.abs() > cut {
                    continue;
                }
            }
            if defect.abs() * MHZ_PER_GHZ < opts.guard_mhz {
                return Err(Error::ForsterResonance {
                    channel: spec.label(),
                    n_a,
                    n_b,
                    defect_mhz: defect * MHZ_PER_GHZ,
                    guard_mhz: opts.guard_mhz,
                });
            }
            let r_a = radial_matrix_element(cache.get(n, spec.initial)?, cache.get(n_a, spec.a)?)?;
            let r_b = radial_matrix_element(cache.get(n, spec.initial)?, cache.get(n_b, spec.b)?)?;
            let product = r_a * r_b;
            let c6 = product * product / (-defect / HARTREE_GHZ) * c6_atomic_unit();
            terms.push(PairTerm {
                n_a,
                n_b,
                defect_ghz: defect,
                radial_product: product,
                c6,
            });
        }
    }
    terms.sort_by(|x, y| y.c6.abs().total_cmp(&x.c6.abs()));
    let c6 = terms.iter().map(|t| t.c6).sum();
    Ok(InteractionChannel {
        spec,
        n,
        c6,
        pair_terms: terms,
    })
}

/// C6 of every channel of the initial state `n term`.
pub fn c6_coefficients(model: &SpeciesModel, n: u32, term: Term, opts: &C6Options) -> Result<Vec<InteractionChannel>> {
    let mut cache = WavefunctionCache::new(model, opts.grid);
    let specs = enumerate_channels(term);
    let all: Vec<(u32, Term)> = specs
        .iter()
        .flat_map(|s| {
            window(n, s.a, opts.n_window)
                .map(move |k| (k, s.a))
                .chain(window(n, s.b, opts.n_window).map(move |k| (k, s.b)))
        })
        .chain(std::iter::once((n, term)))
        .collect();
    cache.prefetch(all)?;
    specs.into_iter().map(|s| c6_coefficient(&mut cache, n, s, opts)).collect()
}

/// Two-atom Zeeman basis (m_A, m_B) of a j multiplet, doubled projections,
/// index = i_A·(2j+1) + i_B with m running from +j down to −j.
pub fn pair_basis(j2: u32) -> Vec<(i32, i32)> {
    let ms = projections(j2);
    ms.iter().flat_map(|&a| ms.iter().map(move |&b| (a, b))).collect()
}

/// Single-atom transition matrix ⟨j' m'|d_p|j m⟩ with the angular weight of
/// the (l j) → (l' j') transition.
fn dipole_component(from: Term, to: Term, p: i32) -> DMatrix<f64> {
    let weight = reduced_dipole_factor(from.l, from.j2, to.l, to.j2).sqrt();
    let mi = projections(from.j2);
    let mf = projections(to.j2);
    DMatrix::from_fn(mf.len(), mi.len(), |a, b| {
        weight * clebsch_gordan(from.j2, mi[b], 2, 2 * p, to.j2, mf[a])
    })
}

/// Dipole–dipole coupling from the initial pair to (a, b) for an axis along z.
fn coupling(initial: Term, a: Term, b: Term) -> DMatrix<f64> {
    let d = |t: Term, p: i32| dipole_component(initial, t, p);
    -(d(a, 0).kronecker(&d(b, 0)) * 2.0 + d(a, 1).kronecker(&d(b, -1)) + d(a, -1).kronecker(&d(b, 1)))
}

/// Angular dyad D_k = Σ_assignments MᵀM on the initial pair space, summed
/// over both assignments of the partner series to atoms A and B.
pub fn angular_dyad(spec: ChannelSpec) -> DMatrix<f64> {
    let ab = coupling(spec.initial, spec.a, spec.b);
    let ba = coupling(spec.initial, spec.b, spec.a);
    ab.transpose() * ab + ba.transpose() * ba
}

/// H = Σ_k C6_k/R⁶ · D_k in MHz, R in μm.
pub fn build_hamiltonian(channels: &[InteractionChannel], r_um: f64) -> Result<DMatrix<f64>> {
    if !(r_um.is_finite() && r_um > 0.0) {
        return Err(Error::InvalidArgument(format!("separation must be positive, got {r_um}")));
    }
    let first = channels
        .first()
        .ok_or_else(|| Error::InvalidArgument("no channels".into()))?;
    let dim = (first.spec.initial.j2 as usize + 1).pow(2);
    let mut h = DMatrix::zeros(dim, dim);
    for ch in channels {
        if ch.spec.initial != first.spec.initial {
            return Err(Error::InvalidArgument("channels belong to different initial states".into()));
        }
        h += angular_dyad(ch.spec) * (ch.c6 * MHZ_PER_GHZ / r_um.powi(6));
    }
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct PairSpectrum {
    pub basis: Vec<(i32, i32)>,
    /// MHz at `reference_r`, ascending.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: DMatrix<f64>,
    /// μm.
    pub reference_r: f64,
}

impl PairSpectrum {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues at separation r_um (MHz).
    pub fn eigenvalues_at(&self, r_um: f64) -> DVector<f64> {
        &self.eigenvalues * (self.reference_r / r_um).powi(6)
    }

    /// ‖H − VΛVᵀ‖_F.
    pub fn reconstruction_residual(&self, h: &DMatrix<f64>) -> f64 {
        let rebuilt = &self.eigenvectors * DMatrix::from_diagonal(&self.eigenvalues) * self.eigenvectors.transpose();
        (h - rebuilt).norm()
    }
}

/// Largest |H_ij − H_ji| relative to max(1, max|H_ij|).
pub fn asymmetry(h: &DMatrix<f64>) -> f64 {
    let scale = h.amax().max(1.0);
    (h - h.transpose()).amax() / scale
}

/// Full eigen-decomposition of a real symmetric pair Hamiltonian.
pub fn diagonalize(h: &DMatrix<f64>, reference_r: f64) -> Result<PairSpectrum> {
    if !h.is_square() {
        return Err(Error::InvalidArgument(format!("matrix is {}×{}", h.nrows(), h.ncols())));
    }
    let asym = asymmetry(h);
    if asym > 1e-10 {
        return Err(Error::NotHermitian(asym));
    }
    let dim = h.nrows();
    let side = (dim as f64).sqrt().round() as usize;
    if side * side != dim || side == 0 {
        return Err(Error::InvalidArgument(format!("dimension {dim} is not (2j+1)²")));
    }
    let sym = (h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&k| eig.eigenvalues[k]));
    let eigenvectors = DMatrix::from_fn(dim, dim, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok(PairSpectrum {
        basis: pair_basis(side as u32 - 1),
        eigenvalues,
        eigenvectors,
        reference_r,
    })
}

/// Channels and spectrum of one initial pair state.
#[derive(Clone, Debug)]
pub struct PairModel {
    pub n: u32,
    pub term: Term,
    pub channels: Vec<InteractionChannel>,
    pub spectrum: PairSpectrum,
}

impl PairModel {
    pub const REFERENCE_R_UM: f64 = 1.0;

    pub fn new(model: &SpeciesModel, n: u32, term: Term, opts: &C6Options) -> Result<Self> {
        let channels = c6_coefficients(model, n, term, opts)?;
        Self::from_channels(n, term, channels)
    }

    pub fn from_channels(n: u32, term: Term, channels: Vec<InteractionChannel>) -> Result<Self> {
        let h = build_hamiltonian(&channels, Self::REFERENCE_R_UM)?;
        let spectrum = diagonalize(&h, Self::REFERENCE_R_UM)?;
        Ok(PairModel {
            n,
            term,
            channels,
            spectrum,
        })
    }

    pub fn hamiltonian(&self, r_um: f64) -> Result<DMatrix<f64>> {
        build_hamiltonian(&self.channels, r_um)
    }
}
