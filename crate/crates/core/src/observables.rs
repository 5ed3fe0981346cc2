//! Measured quantities: staggered order parameter, fidelity, bipartite
//! entanglement entropy, per-site densities and basis overlaps.

use faer::Mat;
use num_complex::Complex64;

use crate::basis::{legal_patterns, ConstrainedBasis};
use crate::error::{Error, Result};
use crate::state::StateVector;

/// Squared singular values below this are dropped from the entropy sum.
pub const SCHMIDT_CUTOFF: f64 = 1e-14;

/// Staggered-magnetization convention.
///
/// `Spin` weighs each site by `(-1)^i (2 n_i - 1)` and reaches 1 on the Z2
/// state; `Density` is the bare alternating density sum and reaches 1/2
/// there. For even chains the two are proportional (`m_spin = 2 m_density`),
/// so spectra differ only in scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Spin,
    Density,
}

/// Per-configuration weight entering the staggered sum.
pub(crate) fn staggered_weights(basis: &ConstrainedBasis, convention: Convention) -> Vec<f64> {
    let n = basis.n_sites();
    basis
        .states()
        .iter()
        .map(|s| {
            let mut acc = 0.0;
            for i in 0..n {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let occ = if s.is_excited(i) { 1.0 } else { 0.0 };
                acc += match convention {
                    Convention::Spin => sign * (2.0 * occ - 1.0),
                    Convention::Density => sign * occ,
                };
            }
            acc / n as f64
        })
        .collect()
}

pub(crate) fn staggered_from_amplitudes(amplitudes: &[Complex64], weights: &[f64]) -> f64 {
    amplitudes
        .iter()
        .zip(weights)
        .map(|(a, w)| a.norm_sqr() * w)
        .sum::<f64>()
        .abs()
}

/// Antiferromagnetic order parameter `m` of a state.
pub fn staggered_magnetization(psi: &StateVector, convention: Convention) -> f64 {
    let weights = staggered_weights(psi.basis(), convention);
    staggered_from_amplitudes(psi.amplitudes(), &weights)
}

/// `|⟨a|b⟩|`.
pub fn fidelity(psi: &StateVector, reference: &StateVector) -> Result<f64> {
    Ok(reference.inner(psi)?.norm())
}

/// Rydberg density `⟨n̂_i⟩` per site.
pub fn site_densities(psi: &StateVector) -> Vec<f64> {
    let basis = psi.basis();
    let n = basis.n_sites();
    let mut densities = vec![0.0; n];
    for (s, a) in basis.states().iter().zip(psi.amplitudes()) {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for (i, d) in densities.iter_mut().enumerate() {
            if s.is_excited(i) {
                *d += p;
            }
        }
    }
    densities
}

/// `|amplitude|` per basis configuration, in heatmap row order
/// (see [`ConstrainedBasis::heatmap_order`]).
pub fn basis_overlaps(psi: &StateVector) -> Vec<f64> {
    let order = psi.basis().heatmap_order();
    let amplitudes = psi.amplitudes();
    order.iter().map(|&k| amplitudes[k].norm()).collect()
}

/// Precomputed bookkeeping for the bipartite entropy at a fixed cut: each
/// basis index maps to one (left pattern, right pattern) cell of the
/// Schmidt matrix. Pairs that would be jointly illegal across the cut never
/// occur in the constrained basis and stay zero.
#[derive(Debug, Clone)]
pub struct EntropyCut {
    left_dim: usize,
    right_dim: usize,
    cells: Vec<(u32, u32)>,
}

impl EntropyCut {
    pub fn new(basis: &ConstrainedBasis, cut: usize) -> Result<Self> {
        let n = basis.n_sites();
        if cut < 1 || cut >= n {
            return Err(Error::Validation(format!("cut = {cut} outside 1..{n}")));
        }
        let left_patterns = legal_patterns(cut);
        let right_patterns = legal_patterns(n - cut);
        let mask = (1u32 << cut) - 1;
        let cells = basis
            .states()
            .iter()
            .map(|s| {
                let a = left_patterns
                    .binary_search(&(s.bits() & mask))
                    .expect("left sub-pattern of a legal pattern is legal");
                let b = right_patterns
                    .binary_search(&(s.bits() >> cut))
                    .expect("right sub-pattern of a legal pattern is legal");
                (a as u32, b as u32)
            })
            .collect();
        Ok(Self {
            left_dim: left_patterns.len(),
            right_dim: right_patterns.len(),
            cells,
        })
    }

    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    /// `ln` of the largest entropy any state can reach across this cut.
    pub fn max_entropy(&self) -> f64 {
        (self.left_dim.min(self.right_dim) as f64).ln()
    }

    /// Von Neumann entropy `-Σ σ² ln σ²` from the singular values of the
    /// amplitude matrix.
    pub fn entropy(&self, amplitudes: &[Complex64]) -> f64 {
        crate::propagator::sequential_linalg();
        let mut m: Mat<Complex64> = Mat::zeros(self.left_dim, self.right_dim);
        for (&(a, b), amp) in self.cells.iter().zip(amplitudes) {
            m[(a as usize, b as usize)] = *amp;
        }
        let svd = m.svd().expect("svd of a finite matrix");
        let mut s = 0.0;
        for sv in svd.S().column_vector().iter() {
            let p = sv.re * sv.re;
            if p >= SCHMIDT_CUTOFF {
                s -= p * p.ln();
            }
        }
        s
    }
}

/// Bipartite entanglement entropy of `psi` for the cut left = sites `< cut`.
pub fn entanglement_entropy(psi: &StateVector, cut: usize) -> Result<f64> {
    Ok(EntropyCut::new(psi.basis(), cut)?.entropy(psi.amplitudes()))
}

/// One row of measured quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    pub m: f64,
    pub fidelity: f64,
    pub entropy: f64,
    pub densities: Vec<f64>,
}

/// Measures everything at once against a reference state, cutting at the
/// basis partition.
pub fn observe(psi: &StateVector, reference: &StateVector) -> Result<ObservableRecord> {
    Ok(ObservableRecord {
        m: staggered_magnetization(psi, Convention::Spin),
        fidelity: fidelity(psi, reference)?,
        entropy: entanglement_entropy(psi, psi.basis().n_left())?,
        densities: site_densities(psi),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::basis::{named_state, NamedState};

    fn basis(n: usize) -> Arc<ConstrainedBasis> {
        Arc::new(ConstrainedBasis::enumerate(n, n / 2).unwrap())
    }

    #[test]
    fn z2_magnetization_by_convention() {
        let basis = basis(8);
        let z2 = named_state(&basis, NamedState::Z2).unwrap();
        assert!((staggered_magnetization(&z2, Convention::Spin) - 1.0).abs() < 1e-12);
        assert!((staggered_magnetization(&z2, Convention::Density) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ground_state_magnetization_cancels_for_even_chains() {
        let basis = basis(10);
        let ground = named_state(&basis, NamedState::Ground).unwrap();
        assert!(staggered_magnetization(&ground, Convention::Spin).abs() < 1e-12);
        assert!(staggered_magnetization(&ground, Convention::Density).abs() < 1e-12);
    }

    #[test]
    fn cat_state_magnetization_cancels() {
        let basis = basis(8);
        let z2 = basis.index_of(NamedState::Z2.pattern(8)).unwrap();
        let z2p = basis.index_of(NamedState::Z2Prime.pattern(8)).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let cat = StateVector::superposition(&basis, &[(z2, one), (z2p, one)]).unwrap();
        assert!(staggered_magnetization(&cat, Convention::Spin).abs() < 1e-12);
    }

    #[test]
    fn spin_is_twice_density_for_even_chains() {
        let basis = basis(10);
        // arbitrary normalized state spread over a few configurations
        let terms: Vec<(usize, Complex64)> = (0..10)
            .map(|k| {
                (
                    k * 7 % basis.dim(),
                    Complex64::new(1.0 + k as f64, 0.3 * k as f64),
                )
            })
            .collect();
        let psi = StateVector::superposition(&basis, &terms).unwrap();
        let spin = staggered_magnetization(&psi, Convention::Spin);
        let density = staggered_magnetization(&psi, Convention::Density);
        assert!((spin - 2.0 * density).abs() < 1e-12);
    }

    #[test]
    fn fidelity_basics() {
        let basis = basis(6);
        let z2 = named_state(&basis, NamedState::Z2).unwrap();
        let ground = named_state(&basis, NamedState::Ground).unwrap();
        assert!((fidelity(&z2, &z2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(fidelity(&z2, &ground).unwrap(), 0.0);
        // symmetric and phase invariant
        let mut rotated = z2.clone();
        for a in rotated.amplitudes_mut() {
            *a *= Complex64::from_polar(1.0, 0.73);
        }
        assert!((fidelity(&rotated, &z2).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            (fidelity(&z2, &rotated).unwrap() - fidelity(&rotated, &z2).unwrap()).abs() < 1e-15
        );
    }

    #[test]
    fn densities_of_product_states() {
        let basis = basis(4);
        let z2 = named_state(&basis, NamedState::Z2).unwrap();
        assert_eq!(site_densities(&z2), vec![1.0, 0.0, 1.0, 0.0]);
        let ground = named_state(&basis, NamedState::Ground).unwrap();
        assert_eq!(site_densities(&ground), vec![0.0; 4]);
    }

    #[test]
    fn half_and_half_densities() {
        let basis = Arc::new(ConstrainedBasis::enumerate(2, 1).unwrap());
        let a = basis.index_of(0b01).unwrap();
        let b = basis.index_of(0b10).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let psi = StateVector::superposition(&basis, &[(a, one), (b, one)]).unwrap();
        let d = site_densities(&psi);
        assert!((d[0] - 0.5).abs() < 1e-12);
        assert!((d[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_states_carry_no_entropy() {
        let basis = basis(8);
        for name in [NamedState::Z2, NamedState::Z2Prime, NamedState::Ground] {
            let psi = named_state(&basis, name).unwrap();
            for cut in 1..8 {
                assert!(entanglement_entropy(&psi, cut).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn z2_cat_state_has_ln2_entropy() {
        let basis = basis(8);
        let z2 = basis.index_of(NamedState::Z2.pattern(8)).unwrap();
        let z2p = basis.index_of(NamedState::Z2Prime.pattern(8)).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let cat = StateVector::superposition(&basis, &[(z2, one), (z2p, one)]).unwrap();
        let s = entanglement_entropy(&cat, 4).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12, "S = {s}");
    }

    #[test]
    fn entropy_is_symmetric_between_halves() {
        let basis = basis(10);
        let terms: Vec<(usize, Complex64)> = (0..25)
            .map(|k| {
                (
                    (k * 13 + 1) % basis.dim(),
                    Complex64::new((k as f64).sin() + 1.5, (k as f64).cos()),
                )
            })
            .collect();
        let psi = StateVector::superposition(&basis, &terms).unwrap();
        // entropy across the cut computed from the left block equals the one
        // from the right block: compare against the transposed arrangement
        let cut = EntropyCut::new(&basis, 4).unwrap();
        let s_left = cut.entropy(psi.amplitudes());
        let mirrored: Vec<(u32, u32)> = cut.cells.iter().map(|&(a, b)| (b, a)).collect();
        let mirrored_cut = EntropyCut {
            left_dim: cut.right_dim,
            right_dim: cut.left_dim,
            cells: mirrored,
        };
        let s_right = mirrored_cut.entropy(psi.amplitudes());
        assert!((s_left - s_right).abs() < 1e-10);
    }

    #[test]
    fn entropy_respects_dimension_bound() {
        let basis = basis(10);
        let terms: Vec<(usize, Complex64)> = (0..basis.dim())
            .map(|k| {
                (
                    k,
                    Complex64::new(((k * k) as f64).sin(), ((k + 3) as f64).cos()),
                )
            })
            .collect();
        let psi = StateVector::superposition(&basis, &terms).unwrap();
        for cut in 1..10 {
            let ec = EntropyCut::new(&basis, cut).unwrap();
            let s = ec.entropy(psi.amplitudes());
            assert!(s >= 0.0);
            assert!(s <= ec.max_entropy() + 1e-12, "cut {cut}: {s}");
        }
    }

    #[test]
    fn entropy_cut_range_is_checked() {
        let basis = basis(6);
        let z2 = named_state(&basis, NamedState::Z2).unwrap();
        assert!(entanglement_entropy(&z2, 0).is_err());
        assert!(entanglement_entropy(&z2, 6).is_err());
    }

    #[test]
    fn overlaps_of_a_product_state() {
        let basis = basis(8);
        let z2 = named_state(&basis, NamedState::Z2).unwrap();
        let overlaps = basis_overlaps(&z2);
        assert_eq!(overlaps[0], 1.0, "Z2 occupies the first heatmap row");
        assert!((overlaps.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(overlaps[1..].iter().all(|&x| x == 0.0));
    }
}
