//! Chain parameters, the bipartite PXP Hamiltonian, and the bichromatic
//! kick schedule.
//!
//! The static Hamiltonian flips a site only when both in-chain neighbours
//! are unexcited, with coupling `Ω_L/2` on sites left of the partition and
//! `Ω_R/2` on the rest. The drive is a pair of delta-kick trains, one per
//! region, each applying the diagonal unitary `exp(-i θ n̂_region)` at
//! multiples of its period.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::{ConstrainedBasis, NamedState, Region};
use crate::error::{Error, Result};

/// (√5 + 1) / 2, the frequency/period ratio of the two drives in the
/// maximally incommensurate presets.
pub const GOLDEN_RATIO: f64 = 1.618033988749895;

/// Two kick times closer than this merge into a single event.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-9;

/// Everything that defines one driven chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParameters {
    pub n_sites: usize,
    pub n_left: usize,
    pub omega_left: f64,
    pub omega_right: f64,
    pub period_left: f64,
    pub period_right: f64,
    pub theta_left: f64,
    pub theta_right: f64,
    pub initial_state: NamedState,
}

impl ChainParameters {
    /// Golden-ratio preset: `Ω_R/Ω_L = T_L/T_R = (√5+1)/2`, kicks at θ = π,
    /// quench from Z2.
    pub fn golden(n_sites: usize, period_left: f64) -> Self {
        Self {
            n_sites,
            n_left: n_sites / 2,
            omega_left: 1.0,
            omega_right: GOLDEN_RATIO,
            period_left,
            period_right: period_left / GOLDEN_RATIO,
            theta_left: PI,
            theta_right: PI,
            initial_state: NamedState::Z2,
        }
    }

    /// Uniform chain: equal Rabi frequencies and a single kick period.
    pub fn uniform(n_sites: usize, period: f64, theta: f64) -> Self {
        Self {
            n_sites,
            n_left: n_sites / 2,
            omega_left: 1.0,
            omega_right: 1.0,
            period_left: period,
            period_right: period,
            theta_left: theta,
            theta_right: theta,
            initial_state: NamedState::Z2,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta_left = theta;
        self.theta_right = theta;
        self
    }

    pub fn with_initial_state(mut self, state: NamedState) -> Self {
        self.initial_state = state;
        self
    }

    /// Left drive angular frequency `f_L = 2π / T_L`.
    pub fn f_left(&self) -> f64 {
        2.0 * PI / self.period_left
    }

    /// Right drive angular frequency `f_R = 2π / T_R`.
    pub fn f_right(&self) -> f64 {
        2.0 * PI / self.period_right
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 || self.n_sites > crate::basis::MAX_SITES {
            return Err(Error::Size(format!(
                "n_sites = {}, supported range is 2..={}",
                self.n_sites,
                crate::basis::MAX_SITES
            )));
        }
        if self.n_left < 1 || self.n_left >= self.n_sites {
            return Err(Error::Partition(format!(
                "n_left = {} does not split a chain of {} sites",
                self.n_left, self.n_sites
            )));
        }
        for (name, v) in [
            ("omega_left", self.omega_left),
            ("omega_right", self.omega_right),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!(
                    "{name} = {v} must be finite and ≥ 0"
                )));
            }
        }
        for (name, v) in [
            ("period_left", self.period_left),
            ("period_right", self.period_right),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Validation(format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [
            ("theta_left", self.theta_left),
            ("theta_right", self.theta_right),
        ] {
            if !v.is_finite() {
                return Err(Error::Validation(format!("{name} = {v} must be finite")));
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<ConstrainedBasis> {
        self.validate()?;
        ConstrainedBasis::enumerate(self.n_sites, self.n_left)
    }
}

impl Default for ChainParameters {
    fn default() -> Self {
        Self::golden(10, 4.74)
    }
}

/// Real symmetric Hamiltonian in coordinate form over a constrained basis.
///
/// The entry list is symmetric-complete: `(i, j, v)` and `(j, i, v)` are both
/// stored. The PXP Hamiltonian has no diagonal part.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    dim: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl SparseHamiltonian {
    /// Builds the bipartite PXP Hamiltonian on `basis`.
    pub fn build_pxp(basis: &ConstrainedBasis, params: &ChainParameters) -> Result<Self> {
        params.validate()?;
        if basis.n_sites() != params.n_sites || basis.n_left() != params.n_left {
            return Err(Error::Consistency(format!(
                "basis is ({}, {}) but parameters say ({}, {})",
                basis.n_sites(),
                basis.n_left(),
                params.n_sites,
                params.n_left
            )));
        }
        let n = basis.n_sites();
        let mut entries = Vec::new();
        for (k, config) in basis.states().iter().enumerate() {
            let bits = config.bits();
            for site in 0..n {
                let left_blocked = site > 0 && bits >> (site - 1) & 1 == 1;
                let right_blocked = site + 1 < n && bits >> (site + 1) & 1 == 1;
                if left_blocked || right_blocked {
                    continue;
                }
                let flipped = bits ^ (1 << site);
                // Upper partner only; the pair below covers both directions.
                if flipped < bits {
                    continue;
                }
                let j = basis
                    .index_of(flipped)
                    .expect("flip of a legal pattern with free neighbours stays legal");
                let omega = if site < params.n_left {
                    params.omega_left
                } else {
                    params.omega_right
                };
                let value = 0.5 * omega;
                if value != 0.0 {
                    entries.push((k as u32, j as u32, value));
                    entries.push((j as u32, k as u32, value));
                }
            }
        }
        Ok(Self {
            dim: basis.dim(),
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, &(_, _, v)| m.max(v.abs()))
    }

    /// `y = H x` for a complex vector.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.fill(Complex64::new(0.0, 0.0));
        for &(r, c, v) in &self.entries {
            y[r as usize] += v * x[c as usize];
        }
    }

    /// ⟨x|H|x⟩ (real for Hermitian H; the real part is returned).
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for &(r, c, v) in &self.entries {
            acc += v * (x[r as usize].conj() * x[c as usize]).re;
        }
        acc
    }

    pub fn to_dense(&self) -> faer::Mat<f64> {
        let mut m = faer::Mat::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r as usize, c as usize)] += v;
        }
        m
    }
}

/// One instantaneous kick: which region(s) are hit at `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickEvent {
    pub time: f64,
    pub left: bool,
    pub right: bool,
}

/// Time-ordered kick events up to a horizon.
#[derive(Debug, Clone)]
pub struct KickSchedule {
    events: Vec<KickEvent>,
    horizon: f64,
}

impl KickSchedule {
    /// Kick trains at `k·T_L` and `k·T_R` for `k ≥ 1`, merged where they
    /// coincide within [`COINCIDENCE_TOLERANCE`]. There is no kick at t = 0.
    pub fn build(params: &ChainParameters, t_max: f64) -> Self {
        let train = |period: f64| -> Vec<f64> {
            let mut times = Vec::new();
            let mut k = 1u64;
            loop {
                let t = k as f64 * period;
                if t > t_max + COINCIDENCE_TOLERANCE {
                    break;
                }
                times.push(t);
                k += 1;
            }
            times
        };
        let lefts = train(params.period_left);
        let rights = train(params.period_right);
        let mut events = Vec::with_capacity(lefts.len() + rights.len());
        let (mut i, mut j) = (0, 0);
        while i < lefts.len() || j < rights.len() {
            match (lefts.get(i), rights.get(j)) {
                (Some(&tl), Some(&tr)) if (tl - tr).abs() < COINCIDENCE_TOLERANCE => {
                    events.push(KickEvent {
                        time: tl,
                        left: true,
                        right: true,
                    });
                    i += 1;
                    j += 1;
                }
                (Some(&tl), Some(&tr)) if tl < tr => {
                    events.push(KickEvent {
                        time: tl,
                        left: true,
                        right: false,
                    });
                    i += 1;
                }
                (Some(_), Some(&tr)) => {
                    events.push(KickEvent {
                        time: tr,
                        left: false,
                        right: true,
                    });
                    j += 1;
                }
                (Some(&tl), None) => {
                    events.push(KickEvent {
                        time: tl,
                        left: true,
                        right: false,
                    });
                    i += 1;
                }
                (None, Some(&tr)) => {
                    events.push(KickEvent {
                        time: tr,
                        left: false,
                        right: true,
                    });
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self {
            events,
            horizon: t_max,
        }
    }

    pub fn events(&self) -> &[KickEvent] {
        &self.events
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// Diagonal of the kick unitary `exp(-i θ n̂_region)` over the basis.
pub fn kick_phases(basis: &ConstrainedBasis, theta: f64, region: Region) -> Vec<Complex64> {
    basis
        .states()
        .iter()
        .map(|s| {
            let n = s.region_excitation_count(region, basis.n_left()) as f64;
            Complex64::from_polar(1.0, -theta * n)
        })
        .collect()
}
