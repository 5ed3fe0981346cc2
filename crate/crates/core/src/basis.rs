//! Enumeration and indexing of the blockade-constrained Hilbert space.
//!
//! A chain of `N` two-level sites (ground / Rydberg) with nearest-neighbour
//! blockade admits exactly those occupation patterns with no two adjacent
//! excitations. For an open chain the number of legal patterns is
//! `Fib(N + 2)` with `Fib(1) = Fib(2) = 1`. The basis is kept sorted by the
//! integer value of the bit pattern (bit `i` set ⇔ site `i` excited), so
//! indexing is reproducible across runs.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Largest supported chain length (`Fib(30)` ≈ 8.3e5 states is still cheap to
/// enumerate; the dense propagator imposes its own, much smaller cap).
pub const MAX_SITES: usize = 28;

/// Which half of the chain an operator or count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Left,
    Right,
}

/// The four product states used as quench initial states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NamedState {
    /// Excitation on even sites: `|●○●○…⟩`.
    #[default]
    Z2,
    /// Excitation on odd sites: `|○●○●…⟩`.
    Z2Prime,
    /// Excitation on every third site starting from site 0.
    Z3,
    /// All sites in the ground state.
    Ground,
}

impl NamedState {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "z2" => Ok(Self::Z2),
            "z2prime" | "z2'" => Ok(Self::Z2Prime),
            "z3" => Ok(Self::Z3),
            "ground" | "g" => Ok(Self::Ground),
            other => Err(Error::Naming(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Z2 => "z2",
            Self::Z2Prime => "z2prime",
            Self::Z3 => "z3",
            Self::Ground => "ground",
        }
    }

    /// Occupation pattern of this state on a chain of `n_sites` sites.
    pub fn pattern(&self, n_sites: usize) -> u32 {
        let step = match self {
            Self::Z2 | Self::Z2Prime => 2,
            Self::Z3 => 3,
            Self::Ground => return 0,
        };
        let start = if matches!(self, Self::Z2Prime) { 1 } else { 0 };
        let mut bits = 0u32;
        let mut site = start;
        while site < n_sites {
            bits |= 1 << site;
            site += step;
        }
        bits
    }
}

impl std::str::FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// A single blockade-legal classical occupation pattern.
///
/// Bit `i` of `bits` is set exactly when site `i` is in the Rydberg state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteConfiguration {
    bits: u32,
    n_sites: u8,
}

impl SiteConfiguration {
    /// Validates the blockade rule (no adjacent excitations, open boundary).
    pub fn new(bits: u32, n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::Size(format!(
                "n_sites = {n_sites}, supported range is 1..={MAX_SITES}"
            )));
        }
        if bits >= (1u32 << n_sites) {
            return Err(Error::Consistency(format!(
                "pattern {bits:#b} has bits beyond site {n_sites}"
            )));
        }
        if bits & (bits >> 1) != 0 {
            return Err(Error::Consistency(format!(
                "pattern {bits:#b} has adjacent excitations"
            )));
        }
        Ok(Self {
            bits,
            n_sites: n_sites as u8,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites as usize
    }

    pub fn is_excited(&self, site: usize) -> bool {
        debug_assert!(site < self.n_sites());
        self.bits >> site & 1 == 1
    }

    pub fn excitation_count(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Number of excitations in the given region for a cut at `n_left`.
    pub fn region_excitation_count(&self, region: Region, n_left: usize) -> u32 {
        let left_mask = (1u32 << n_left) - 1;
        match region {
            Region::Left => (self.bits & left_mask).count_ones(),
            Region::Right => (self.bits & !left_mask).count_ones(),
        }
    }

    /// Occupation string with site 0 leftmost, e.g. `1010` for Z2 on 4 sites.
    pub fn pattern_string(&self) -> String {
        (0..self.n_sites())
            .map(|i| if self.is_excited(i) { '1' } else { '0' })
            .collect()
    }

    /// Number of sites at which two patterns differ.
    pub fn hamming_distance(&self, other: u32) -> u32 {
        (self.bits ^ other).count_ones()
    }
}

/// All legal patterns of an open `n`-site chain, ascending by integer value.
///
/// Stand-alone so the entropy code can enumerate sub-chain patterns without
/// carrying a partition around.
pub(crate) fn legal_patterns(n_sites: usize) -> Vec<u32> {
    // Grow site by site; a new excitation is allowed when the previous site
    // is unexcited. Sorted afterwards to fix the index order.
    let mut patterns = vec![0u32];
    for site in 0..n_sites {
        let mut next = Vec::with_capacity(patterns.len() * 2);
        for &p in &patterns {
            next.push(p);
            if site == 0 || p >> (site - 1) & 1 == 0 {
                next.push(p | 1 << site);
            }
        }
        patterns = next;
    }
    patterns.sort_unstable();
    patterns
}

/// The enumerated, indexed constrained space of one chain with a fixed
/// left/right partition.
#[derive(Debug, Clone)]
pub struct ConstrainedBasis {
    n_sites: usize,
    n_left: usize,
    states: Vec<SiteConfiguration>,
}

impl ConstrainedBasis {
    /// Enumerates every blockade-legal configuration of an open chain,
    /// sorted ascending by bit-pattern value.
    pub fn enumerate(n_sites: usize, n_left: usize) -> Result<Self> {
        if !(1..=MAX_SITES).contains(&n_sites) {
            return Err(Error::Size(format!(
                "n_sites = {n_sites}, supported range is 1..={MAX_SITES}"
            )));
        }
        if n_left < 1 || n_left >= n_sites {
            return Err(Error::Partition(format!(
                "n_left = {n_left} does not split a chain of {n_sites} sites"
            )));
        }
        let states = legal_patterns(n_sites)
            .into_iter()
            .map(|bits| SiteConfiguration {
                bits,
                n_sites: n_sites as u8,
            })
            .collect();
        Ok(Self {
            n_sites,
            n_left,
            states,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_sites - self.n_left
    }

    /// Hilbert-space dimension, `Fib(n_sites + 2)`.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[SiteConfiguration] {
        &self.states
    }

    pub fn state(&self, index: usize) -> SiteConfiguration {
        self.states[index]
    }

    /// Position of a pattern in the sorted state list.
    pub fn index_of(&self, bits: u32) -> Option<usize> {
        self.states.binary_search_by_key(&bits, |s| s.bits()).ok()
    }

    /// Two bases describe the same space when chain and partition agree.
    pub fn compatible(&self, other: &Self) -> bool {
        self.n_sites == other.n_sites && self.n_left == other.n_left
    }

    /// Basis indices reordered for trajectory heatmaps: ascending Hamming
    /// distance from the Z2 pattern, ties broken by bit-pattern value. Z2 is
    /// first; for even chains Z2′ (the farthest pattern) is last.
    pub fn heatmap_order(&self) -> Vec<usize> {
        let z2 = NamedState::Z2.pattern(self.n_sites);
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by_key(|&k| (self.states[k].hamming_distance(z2), self.states[k].bits()));
        order
    }
}

/// Unit vector concentrated on one named product configuration.
pub fn named_state(basis: &Arc<ConstrainedBasis>, name: NamedState) -> Result<StateVector> {
    let pattern = name.pattern(basis.n_sites());
    let index = basis.index_of(pattern).ok_or_else(|| {
        Error::Consistency(format!(
            "pattern {pattern:#b} for {} is not in the basis",
            name.name()
        ))
    })?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
    amplitudes[index] = Complex64::new(1.0, 0.0);
    StateVector::new(Arc::clone(basis), amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(n: usize) -> usize {
        (0u32..1 << n).filter(|b| b & (b >> 1) == 0).count()
    }

    #[test]
    fn two_sites_exclude_double_excitation() {
        let basis = ConstrainedBasis::enumerate(2, 1).unwrap();
        let bits: Vec<u32> = basis.states().iter().map(|s| s.bits()).collect();
        assert_eq!(bits, vec![0b00, 0b01, 0b10]);
    }

    #[test]
    fn three_sites_match_brute_force_filter() {
        let basis = ConstrainedBasis::enumerate(3, 1).unwrap();
        let bits: Vec<u32> = basis.states().iter().map(|s| s.bits()).collect();
        assert_eq!(bits, vec![0b000, 0b001, 0b010, 0b100, 0b101]);
    }

    #[test]
    fn ten_sites_give_fibonacci_dimension() {
        let basis = ConstrainedBasis::enumerate(10, 5).unwrap();
        assert_eq!(basis.dim(), 144); // Fib(12)
        assert_eq!(basis.dim(), brute_force_count(10));
    }

    #[test]
    fn counts_match_brute_force_for_all_small_chains() {
        for n in 2..=16 {
            let basis = ConstrainedBasis::enumerate(n, n / 2).unwrap();
            assert_eq!(basis.dim(), brute_force_count(n), "N = {n}");
        }
    }

    #[test]
    fn index_inverts_state_list() {
        let basis = ConstrainedBasis::enumerate(12, 6).unwrap();
        for (k, s) in basis.states().iter().enumerate() {
            assert_eq!(basis.index_of(s.bits()), Some(k));
        }
        assert_eq!(basis.index_of(0b11), None);
    }

    #[test]
    fn size_and_partition_errors() {
        assert!(matches!(
            ConstrainedBasis::enumerate(0, 0),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            ConstrainedBasis::enumerate(MAX_SITES + 1, 4),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            ConstrainedBasis::enumerate(4, 0),
            Err(Error::Partition(_))
        ));
        assert!(matches!(
            ConstrainedBasis::enumerate(4, 4),
            Err(Error::Partition(_))
        ));
        // a single site cannot be partitioned at all
        assert!(matches!(
            ConstrainedBasis::enumerate(1, 1),
            Err(Error::Partition(_))
        ));
    }

    #[test]
    fn named_patterns() {
        assert_eq!(NamedState::Z2.pattern(4), 0b0101); // sites 0 and 2
        assert_eq!(NamedState::Z2Prime.pattern(4), 0b1010);
        assert_eq!(NamedState::Z3.pattern(9), (1 << 0) | (1 << 3) | (1 << 6));
        assert_eq!(NamedState::Ground.pattern(7), 0);
    }

    #[test]
    fn named_state_vectors_are_unit_point_masses() {
        let basis = Arc::new(ConstrainedBasis::enumerate(4, 2).unwrap());
        let z2 = named_state(&basis, NamedState::Z2).unwrap();
        let idx = basis.index_of(0b0101).unwrap();
        for (k, a) in z2.amplitudes().iter().enumerate() {
            let expected = if k == idx { 1.0 } else { 0.0 };
            assert_eq!(a.re, expected);
            assert_eq!(a.im, 0.0);
        }
        let ground = named_state(&basis, NamedState::Ground).unwrap();
        assert_eq!(ground.amplitudes()[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn z2_and_z2prime_distinct_for_even_chains() {
        for n in [4, 6, 8, 10, 12] {
            let basis = Arc::new(ConstrainedBasis::enumerate(n, n / 2).unwrap());
            let a = NamedState::Z2.pattern(n);
            let b = NamedState::Z2Prime.pattern(n);
            assert_ne!(a, b);
            assert!(basis.index_of(a).is_some());
            assert!(basis.index_of(b).is_some());
            assert!(basis.index_of(0).is_some());
        }
    }

    #[test]
    fn region_counts() {
        let c = SiteConfiguration::new(0b0101, 4).unwrap();
        assert_eq!(c.region_excitation_count(Region::Left, 2), 1);
        assert_eq!(c.region_excitation_count(Region::Right, 2), 1);
        let empty = SiteConfiguration::new(0, 5).unwrap();
        assert_eq!(empty.region_excitation_count(Region::Left, 2), 0);
        assert_eq!(empty.region_excitation_count(Region::Right, 2), 0);
    }

    #[test]
    fn heatmap_order_starts_at_z2_and_ends_at_z2prime() {
        let basis = ConstrainedBasis::enumerate(8, 4).unwrap();
        let order = basis.heatmap_order();
        assert_eq!(
            basis.state(order[0]).bits(),
            NamedState::Z2.pattern(8),
            "closest row is Z2 itself"
        );
        assert_eq!(
            basis.state(*order.last().unwrap()).bits(),
            NamedState::Z2Prime.pattern(8),
            "farthest row is Z2'"
        );
    }

    #[test]
    fn pattern_string_reads_site_zero_first() {
        let c = SiteConfiguration::new(0b0101, 4).unwrap();
        assert_eq!(c.pattern_string(), "1010");
    }
}
