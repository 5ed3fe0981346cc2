//! Exact unitary evolution through alternating continuous segments and
//! instantaneous kicks.
//!
//! The dense engine diagonalizes the Hamiltonian once and keeps the state in
//! the eigenbasis: between events the evolution is a diagonal phase, a sample
//! costs one matrix–vector product back to the configuration basis, and a
//! kick costs a round trip. Kick gaps set by two incommensurate trains are
//! irregular, so nothing per-step is cached; the decomposition amortizes over
//! whole runs and entire parameter sweeps. Evolution is exact per segment:
//! there is no integrator step size, only the observable sampling grid.

use std::sync::{Arc, Mutex};

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par, Side};
use num_complex::Complex64;

use crate::basis::{named_state, ConstrainedBasis, Region};
use crate::error::{Error, Result};
use crate::krylov;
use crate::model::{
    kick_phases, ChainParameters, KickSchedule, SparseHamiltonian, COINCIDENCE_TOLERANCE,
};
use crate::observables::{staggered_weights, Convention, EntropyCut};
use crate::state::StateVector;

/// Largest dimension the dense engine will diagonalize (N = 16 needs 2584).
pub const DENSE_CAP: usize = 4096;

/// Relative reconstruction error allowed for a decomposition.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-9;

/// Evolution engine selection.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Engine {
    /// One spectral decomposition, exact segment propagation. The default.
    #[default]
    Dense,
    /// Krylov-subspace approximation of each segment from the sparse matrix,
    /// for dimensions past [`DENSE_CAP`].
    Krylov {
        /// Per-segment approximation error bound.
        tolerance: f64,
    },
}

/// Eigenvalues and orthonormal eigenvectors of a real symmetric Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: Mat<f64>,
}

/// Pins faer to sequential execution. Nested factorizations inside sweep
/// workers must not depend on the ambient pool size, or sweep output would
/// differ between worker counts.
pub(crate) fn sequential_linalg() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(Par::Seq));
}

/// Dense symmetric eigendecomposition with reconstruction and orthonormality
/// checks.
pub fn decompose(h: &SparseHamiltonian) -> Result<SpectralDecomposition> {
    sequential_linalg();
    let d = h.dim();
    if d > DENSE_CAP {
        return Err(Error::Numerical(format!(
            "dimension {d} exceeds the dense cap {DENSE_CAP}"
        )));
    }
    let dense = h.to_dense();
    let eig = faer::linalg::solvers::SelfAdjointEigen::new(dense.as_ref(), Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let vectors = eig.U().to_owned();
    let eigenvalues: Vec<f64> = eig.S().column_vector().iter().copied().collect();

    // V diag(E) Vᵀ must reproduce H and VᵀV must be the identity.
    let scale = h.max_abs().max(1.0);
    let mut scaled = vectors.clone();
    for (j, &e) in eigenvalues.iter().enumerate() {
        for i in 0..d {
            scaled[(i, j)] *= e;
        }
    }
    let mut reconstructed = Mat::zeros(d, d);
    matmul(
        reconstructed.as_mut(),
        Accum::Replace,
        scaled.as_ref(),
        vectors.transpose(),
        1.0,
        faer::get_global_parallelism(),
    );
    let mut max_dev = 0.0f64;
    for &(r, c, v) in h.entries() {
        reconstructed[(r as usize, c as usize)] -= v;
    }
    for j in 0..d {
        for i in 0..d {
            max_dev = max_dev.max(reconstructed[(i, j)].abs());
        }
    }
    if max_dev > DECOMPOSITION_TOLERANCE * scale {
        return Err(Error::Numerical(format!(
            "reconstruction error {max_dev:.3e} exceeds {:.3e}",
            DECOMPOSITION_TOLERANCE * scale
        )));
    }
    let mut gram = Mat::zeros(d, d);
    matmul(
        gram.as_mut(),
        Accum::Replace,
        vectors.transpose(),
        vectors.as_ref(),
        1.0,
        faer::get_global_parallelism(),
    );
    let mut ortho_dev = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            let expected = if i == j { 1.0 } else { 0.0 };
            ortho_dev = ortho_dev.max((gram[(i, j)] - expected).abs());
        }
    }
    if ortho_dev > DECOMPOSITION_TOLERANCE {
        return Err(Error::Numerical(format!(
            "eigenvectors deviate from orthonormality by {ortho_dev:.3e}"
        )));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
    })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> MatRef<'_, f64> {
        self.vectors.as_ref()
    }

    /// `exp(-i H dt) |psi⟩` via the eigenbasis.
    pub fn evolve_interval(&self, psi: &StateVector, dt: f64) -> StateVector {
        assert!(dt >= 0.0, "negative evolution interval");
        let mut coeffs = self.to_eigenbasis(psi.amplitudes());
        rotate_modes(&mut coeffs, &self.eigenvalues, dt);
        let amplitudes = self.configuration_amplitudes(&coeffs);
        StateVector::from_parts(Arc::clone(psi.basis()), amplitudes)
    }

    fn to_eigenbasis(&self, amplitudes: &[Complex64]) -> ReImPair {
        let mut out = ReImPair::zeros(self.dim());
        let src = ReImPair::from_complex(amplitudes);
        out.matmul_from(self.vectors.transpose(), &src);
        out
    }

    fn configuration_amplitudes(&self, coeffs: &ReImPair) -> Vec<Complex64> {
        let mut out = ReImPair::zeros(self.dim());
        out.matmul_from(self.vectors.as_ref(), coeffs);
        out.to_complex()
    }
}

/// Complex vector stored as a two-column real matrix so that segment
/// propagation reduces to real GEMMs.
struct ReImPair {
    data: Mat<f64>,
}

impl ReImPair {
    fn zeros(d: usize) -> Self {
        Self {
            data: Mat::zeros(d, 2),
        }
    }

    fn from_complex(amplitudes: &[Complex64]) -> Self {
        let mut data = Mat::zeros(amplitudes.len(), 2);
        for (i, a) in amplitudes.iter().enumerate() {
            data[(i, 0)] = a.re;
            data[(i, 1)] = a.im;
        }
        Self { data }
    }

    fn to_complex(&self) -> Vec<Complex64> {
        (0..self.data.nrows())
            .map(|i| Complex64::new(self.data[(i, 0)], self.data[(i, 1)]))
            .collect()
    }

    fn write_complex(&self, out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = Complex64::new(self.data[(i, 0)], self.data[(i, 1)]);
        }
    }

    fn read_complex(&mut self, amplitudes: &[Complex64]) {
        for (i, a) in amplitudes.iter().enumerate() {
            self.data[(i, 0)] = a.re;
            self.data[(i, 1)] = a.im;
        }
    }

    /// `self = m × src`, sequential so results do not depend on the worker
    /// pool this runs inside of.
    fn matmul_from(&mut self, m: MatRef<'_, f64>, src: &ReImPair) {
        matmul(
            self.data.as_mut(),
            Accum::Replace,
            m,
            src.data.as_ref(),
            1.0,
            Par::Seq,
        );
    }
}

/// Rotates each eigenmode by `exp(-i E dt)`.
fn rotate_modes(coeffs: &mut ReImPair, eigenvalues: &[f64], dt: f64) {
    for (i, &e) in eigenvalues.iter().enumerate() {
        let (s, c) = (e * dt).sin_cos();
        let re = coeffs.data[(i, 0)];
        let im = coeffs.data[(i, 1)];
        coeffs.data[(i, 0)] = re * c + im * s;
        coeffs.data[(i, 1)] = im * c - re * s;
    }
}

/// Elementwise product with a diagonal phase table.
pub fn apply_kick(psi: &StateVector, phases: &[Complex64]) -> Result<StateVector> {
    if phases.len() != psi.dim() {
        return Err(Error::Consistency(format!(
            "{} phases for a {}-dimensional state",
            phases.len(),
            psi.dim()
        )));
    }
    let amplitudes = psi
        .amplitudes()
        .iter()
        .zip(phases)
        .map(|(a, p)| a * p)
        .collect();
    Ok(StateVector::from_parts(Arc::clone(psi.basis()), amplitudes))
}

/// Which series to record while evolving.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    pub magnetization: bool,
    pub convention: Convention,
    pub fidelity: bool,
    pub entropy: bool,
    /// Entropy cut position; the chain partition when `None`.
    pub entropy_cut: Option<usize>,
    pub densities: bool,
    pub overlaps: bool,
    pub keep_states: bool,
}

impl Default for ObservableSet {
    fn default() -> Self {
        Self {
            magnetization: true,
            convention: Convention::Spin,
            fidelity: true,
            entropy: true,
            entropy_cut: None,
            densities: false,
            overlaps: false,
            keep_states: false,
        }
    }
}

impl ObservableSet {
    pub fn magnetization_only(convention: Convention) -> Self {
        Self {
            magnetization: true,
            convention,
            fidelity: false,
            entropy: false,
            entropy_cut: None,
            densities: false,
            overlaps: false,
            keep_states: false,
        }
    }

    pub fn fidelity_only() -> Self {
        Self {
            magnetization: false,
            fidelity: true,
            entropy: false,
            ..Self::magnetization_only(Convention::Spin)
        }
    }

    pub fn entropy_only() -> Self {
        Self {
            magnetization: false,
            fidelity: false,
            entropy: true,
            ..Self::magnetization_only(Convention::Spin)
        }
    }
}

/// Observable series on a uniform sample grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub sample_dt: f64,
    pub times: Vec<f64>,
    pub magnetization: Option<Vec<f64>>,
    pub fidelity: Option<Vec<f64>>,
    pub entropy: Option<Vec<f64>>,
    pub densities: Option<Vec<Vec<f64>>>,
    pub overlaps: Option<Vec<Vec<f64>>>,
    pub states: Option<Vec<StateVector>>,
    /// Largest deviation of the state norm from 1 seen at any sample.
    pub max_norm_drift: f64,
}

struct Recorder {
    basis: Arc<ConstrainedBasis>,
    weights: Option<Vec<f64>>,
    reference: Option<Vec<Complex64>>,
    cut: Option<EntropyCut>,
    heatmap_order: Option<Vec<usize>>,
    density_flag: bool,
    keep_states: bool,
    times: Vec<f64>,
    magnetization: Vec<f64>,
    fidelity: Vec<f64>,
    entropy: Vec<f64>,
    densities: Vec<Vec<f64>>,
    overlaps: Vec<Vec<f64>>,
    states: Vec<StateVector>,
    max_norm_drift: f64,
}

impl Recorder {
    fn new(
        basis: &Arc<ConstrainedBasis>,
        set: &ObservableSet,
        reference: &StateVector,
    ) -> Result<Self> {
        let cut = if set.entropy {
            Some(EntropyCut::new(
                basis,
                set.entropy_cut.unwrap_or(basis.n_left()),
            )?)
        } else {
            None
        };
        Ok(Self {
            basis: Arc::clone(basis),
            weights: set
                .magnetization
                .then(|| staggered_weights(basis, set.convention)),
            reference: set.fidelity.then(|| reference.amplitudes().to_vec()),
            cut,
            heatmap_order: set.overlaps.then(|| basis.heatmap_order()),
            density_flag: set.densities,
            keep_states: set.keep_states,
            times: Vec::new(),
            magnetization: Vec::new(),
            fidelity: Vec::new(),
            entropy: Vec::new(),
            densities: Vec::new(),
            overlaps: Vec::new(),
            states: Vec::new(),
            max_norm_drift: 0.0,
        })
    }

    fn record(&mut self, t: f64, amplitudes: &[Complex64]) {
        self.times.push(t);
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        self.max_norm_drift = self.max_norm_drift.max((norm_sq.sqrt() - 1.0).abs());
        if let Some(w) = &self.weights {
            self.magnetization
                .push(crate::observables::staggered_from_amplitudes(amplitudes, w));
        }
        if let Some(r) = &self.reference {
            let overlap: Complex64 = r.iter().zip(amplitudes).map(|(a, b)| a.conj() * b).sum();
            self.fidelity.push(overlap.norm());
        }
        if let Some(cut) = &self.cut {
            self.entropy.push(cut.entropy(amplitudes));
        }
        if self.density_flag {
            let mut d = vec![0.0; self.basis.n_sites()];
            for (s, a) in self.basis.states().iter().zip(amplitudes) {
                let p = a.norm_sqr();
                if p == 0.0 {
                    continue;
                }
                let bits = s.bits();
                for (i, di) in d.iter_mut().enumerate() {
                    if bits >> i & 1 == 1 {
                        *di += p;
                    }
                }
            }
            self.densities.push(d);
        }
        if let Some(order) = &self.heatmap_order {
            self.overlaps
                .push(order.iter().map(|&k| amplitudes[k].norm()).collect());
        }
        if self.keep_states {
            self.states.push(StateVector::from_parts(
                Arc::clone(&self.basis),
                amplitudes.to_vec(),
            ));
        }
    }

    fn finish(self, sample_dt: f64) -> Trajectory {
        Trajectory {
            sample_dt,
            times: self.times,
            magnetization: self.weights.is_some().then_some(self.magnetization),
            fidelity: self.reference.is_some().then_some(self.fidelity),
            entropy: self.cut.is_some().then_some(self.entropy),
            densities: self.density_flag.then_some(self.densities),
            overlaps: self.heatmap_order.is_some().then_some(self.overlaps),
            states: self.keep_states.then_some(self.states),
            max_norm_drift: self.max_norm_drift,
        }
    }
}

/// Reusable evolution context: basis, Hamiltonian, and a lazily computed
/// spectral decomposition shared across runs that only differ in drive
/// parameters (θ, periods, initial state).
pub struct Simulator {
    basis: Arc<ConstrainedBasis>,
    hamiltonian: SparseHamiltonian,
    omega_left: f64,
    omega_right: f64,
    decomposition: Mutex<Option<Arc<SpectralDecomposition>>>,
}

impl Simulator {
    pub fn new(params: &ChainParameters) -> Result<Self> {
        params.validate()?;
        let basis = Arc::new(ConstrainedBasis::enumerate(params.n_sites, params.n_left)?);
        let hamiltonian = SparseHamiltonian::build_pxp(&basis, params)?;
        Ok(Self {
            basis,
            hamiltonian,
            omega_left: params.omega_left,
            omega_right: params.omega_right,
            decomposition: Mutex::new(None),
        })
    }

    pub fn basis(&self) -> &Arc<ConstrainedBasis> {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &SparseHamiltonian {
        &self.hamiltonian
    }

    /// Computes (once) and shares the spectral decomposition.
    pub fn decomposition(&self) -> Result<Arc<SpectralDecomposition>> {
        let mut guard = self
            .decomposition
            .lock()
            .expect("decomposition lock poisoned");
        if let Some(d) = guard.as_ref() {
            return Ok(Arc::clone(d));
        }
        let d = Arc::new(decompose(&self.hamiltonian)?);
        *guard = Some(Arc::clone(&d));
        Ok(d)
    }

    fn check_compatible(&self, params: &ChainParameters) -> Result<()> {
        if params.n_sites != self.basis.n_sites()
            || params.n_left != self.basis.n_left()
            || params.omega_left != self.omega_left
            || params.omega_right != self.omega_right
        {
            return Err(Error::Consistency(
                "parameters do not match the chain this simulator was built for".into(),
            ));
        }
        Ok(())
    }

    /// Evolves the configured initial state to `t_max`, sampling every
    /// `sample_dt`. Kicks landing exactly on a sample time are applied after
    /// the sample is taken.
    pub fn run(
        &self,
        params: &ChainParameters,
        t_max: f64,
        sample_dt: f64,
        observables: &ObservableSet,
        engine: Engine,
    ) -> Result<Trajectory> {
        params.validate()?;
        self.check_compatible(params)?;
        if !sample_dt.is_finite() || sample_dt <= 0.0 {
            return Err(Error::Validation(format!(
                "sample_dt = {sample_dt} must be positive"
            )));
        }
        if !t_max.is_finite() || t_max < 0.0 {
            return Err(Error::Validation(format!(
                "t_max = {t_max} must be non-negative"
            )));
        }

        let initial = named_state(&self.basis, params.initial_state)?;
        let schedule = KickSchedule::build(params, t_max);
        let phases_left = kick_phases(&self.basis, params.theta_left, Region::Left);
        let phases_right = kick_phases(&self.basis, params.theta_right, Region::Right);
        let n_samples = (t_max / sample_dt + COINCIDENCE_TOLERANCE).floor() as usize;

        let mut recorder = Recorder::new(&self.basis, observables, &initial)?;

        match engine {
            Engine::Dense => self.run_dense(
                params,
                &initial,
                &schedule,
                &phases_left,
                &phases_right,
                n_samples,
                sample_dt,
                &mut recorder,
            )?,
            Engine::Krylov { tolerance } => self.run_krylov(
                tolerance,
                &initial,
                &schedule,
                &phases_left,
                &phases_right,
                n_samples,
                sample_dt,
                &mut recorder,
            )?,
        }
        Ok(recorder.finish(sample_dt))
    }

    #[allow(clippy::too_many_arguments)]
    fn run_dense(
        &self,
        _params: &ChainParameters,
        initial: &StateVector,
        schedule: &KickSchedule,
        phases_left: &[Complex64],
        phases_right: &[Complex64],
        n_samples: usize,
        sample_dt: f64,
        recorder: &mut Recorder,
    ) -> Result<()> {
        let decomp = self.decomposition()?;
        let d = decomp.dim();
        let mut coeffs = decomp.to_eigenbasis(initial.amplitudes());
        let mut config = ReImPair::zeros(d);
        let mut buffer = vec![Complex64::new(0.0, 0.0); d];
        let mut t_current = 0.0f64;

        let kicks = schedule.events();
        let mut sample_idx = 0usize;
        let mut kick_idx = 0usize;
        loop {
            let next_sample = (sample_idx <= n_samples).then_some(sample_idx as f64 * sample_dt);
            let next_kick = kicks.get(kick_idx).map(|e| e.time);
            let take_sample = match (next_sample, next_kick) {
                (Some(ts), Some(tk)) => ts <= tk + COINCIDENCE_TOLERANCE,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_sample {
                let t = next_sample.unwrap();
                if t - t_current > 0.0 {
                    rotate_modes(&mut coeffs, &decomp.eigenvalues, t - t_current);
                    t_current = t;
                }
                config.matmul_from(decomp.vectors.as_ref(), &coeffs);
                config.write_complex(&mut buffer);
                recorder.record(t, &buffer);
                sample_idx += 1;
            } else {
                let event = kicks[kick_idx];
                if event.time - t_current > 0.0 {
                    rotate_modes(&mut coeffs, &decomp.eigenvalues, event.time - t_current);
                    t_current = event.time;
                }
                config.matmul_from(decomp.vectors.as_ref(), &coeffs);
                config.write_complex(&mut buffer);
                multiply_kick(
                    &mut buffer,
                    event.left,
                    event.right,
                    phases_left,
                    phases_right,
                );
                config.read_complex(&buffer);
                coeffs.matmul_from(decomp.vectors.transpose(), &config);
                kick_idx += 1;
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn run_krylov(
        &self,
        tolerance: f64,
        initial: &StateVector,
        schedule: &KickSchedule,
        phases_left: &[Complex64],
        phases_right: &[Complex64],
        n_samples: usize,
        sample_dt: f64,
        recorder: &mut Recorder,
    ) -> Result<()> {
        let mut psi = initial.amplitudes().to_vec();
        let mut t_current = 0.0f64;
        let kicks = schedule.events();
        let mut sample_idx = 0usize;
        let mut kick_idx = 0usize;
        loop {
            let next_sample = (sample_idx <= n_samples).then_some(sample_idx as f64 * sample_dt);
            let next_kick = kicks.get(kick_idx).map(|e| e.time);
            let take_sample = match (next_sample, next_kick) {
                (Some(ts), Some(tk)) => ts <= tk + COINCIDENCE_TOLERANCE,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            let target = if take_sample {
                next_sample.unwrap()
            } else {
                kicks[kick_idx].time
            };
            if target - t_current > 0.0 {
                psi =
                    krylov::expm_multiply(&self.hamiltonian, &psi, target - t_current, tolerance)?;
                t_current = target;
            }
            if take_sample {
                recorder.record(target, &psi);
                sample_idx += 1;
            } else {
                let event = kicks[kick_idx];
                multiply_kick(&mut psi, event.left, event.right, phases_left, phases_right);
                kick_idx += 1;
            }
        }
        Ok(())
    }
}

fn multiply_kick(
    psi: &mut [Complex64],
    left: bool,
    right: bool,
    phases_left: &[Complex64],
    phases_right: &[Complex64],
) {
    if left {
        for (a, p) in psi.iter_mut().zip(phases_left) {
            *a *= p;
        }
    }
    if right {
        for (a, p) in psi.iter_mut().zip(phases_right) {
            *a *= p;
        }
    }
}

/// One-shot run with the dense engine.
pub fn run(
    params: &ChainParameters,
    t_max: f64,
    sample_dt: f64,
    observables: &ObservableSet,
) -> Result<Trajectory> {
    Simulator::new(params)?.run(params, t_max, sample_dt, observables, Engine::Dense)
}
