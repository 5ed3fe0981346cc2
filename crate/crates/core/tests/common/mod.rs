#![allow(dead_code)] // each test target uses a different subset

//! Brute-force full-space evolution used as an independent oracle.
//!
//! Every 2^N bitmask is a basis state; the neighbour-projected flip
//! operators are built directly, kicks are diagonal phases over bitmasks,
//! and each inter-kick segment is integrated with a scaled Taylor expansion
//! of the propagator. Nothing is shared with the production evolution path
//! except the chain parameters.

use num_complex::Complex64;

use dtqc_core::*;

pub fn full_space_hamiltonian(params: &ChainParameters) -> Vec<f64> {
    let n = params.n_sites;
    let dim = 1usize << n;
    let mut h = vec![0.0; dim * dim];
    for b in 0..dim as u32 {
        for site in 0..n {
            let left_blocked = site > 0 && b >> (site - 1) & 1 == 1;
            let right_blocked = site + 1 < n && b >> (site + 1) & 1 == 1;
            if left_blocked || right_blocked {
                continue;
            }
            let flipped = b ^ (1 << site);
            let omega = if site < params.n_left {
                params.omega_left
            } else {
                params.omega_right
            };
            h[b as usize * dim + flipped as usize] += 0.5 * omega;
        }
    }
    h
}

fn matvec(h: &[f64], x: &[Complex64], y: &mut [Complex64]) {
    let dim = x.len();
    for (r, yr) in y.iter_mut().enumerate() {
        let row = &h[r * dim..(r + 1) * dim];
        let mut acc = Complex64::new(0.0, 0.0);
        for (v, xc) in row.iter().zip(x) {
            if *v != 0.0 {
                acc += v * xc;
            }
        }
        *yr = acc;
    }
}

/// `psi ← exp(-i H dt) psi` by Taylor series over short substeps.
pub fn taylor_evolve(h: &[f64], psi: &mut [Complex64], dt: f64, h_scale: f64) {
    let substeps = (h_scale * dt / 0.5).ceil().max(1.0) as usize;
    let delta = dt / substeps as f64;
    let dim = psi.len();
    let mut term = vec![Complex64::new(0.0, 0.0); dim];
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for _ in 0..substeps {
        let mut acc = psi.to_vec();
        term.copy_from_slice(psi);
        let mut k = 1.0;
        loop {
            matvec(h, &term, &mut next);
            let factor = Complex64::new(0.0, -delta / k);
            for (t, n) in term.iter_mut().zip(&next) {
                *t = factor * n;
            }
            let mut term_norm = 0.0f64;
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
                term_norm += t.norm_sqr();
            }
            if term_norm.sqrt() < 1e-16 {
                break;
            }
            k += 1.0;
        }
        psi.copy_from_slice(&acc);
    }
}

fn full_space_kick(psi: &mut [Complex64], theta: f64, site_range: std::ops::Range<usize>) {
    for (b, a) in psi.iter_mut().enumerate() {
        let mut count = 0u32;
        for site in site_range.clone() {
            count += (b >> site) as u32 & 1;
        }
        *a *= Complex64::from_polar(1.0, -theta * count as f64);
    }
}

/// Evolves the named initial state of `params` to `t_max` entirely in the
/// unconstrained 2^N space.
pub fn full_space_evolve(params: &ChainParameters, t_max: f64) -> Vec<Complex64> {
    let n = params.n_sites;
    let dim = 1usize << n;
    let h = full_space_hamiltonian(params);
    let h_scale = 0.5 * (params.omega_left + params.omega_right) * n as f64;
    let start = params.initial_state.pattern(n) as usize;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[start] = Complex64::new(1.0, 0.0);

    // kick trains rebuilt from scratch
    let mut events: Vec<(f64, bool)> = Vec::new(); // (time, is_left)
    for k in 1.. {
        let t = k as f64 * params.period_left;
        if t > t_max {
            break;
        }
        events.push((t, true));
    }
    for k in 1.. {
        let t = k as f64 * params.period_right;
        if t > t_max {
            break;
        }
        events.push((t, false));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut t_current = 0.0;
    for (t, is_left) in events {
        taylor_evolve(&h, &mut psi, t - t_current, h_scale);
        t_current = t;
        if is_left {
            full_space_kick(&mut psi, params.theta_left, 0..params.n_left);
        } else {
            full_space_kick(&mut psi, params.theta_right, params.n_left..n);
        }
    }
    taylor_evolve(&h, &mut psi, t_max - t_current, h_scale);
    psi
}

/// Runs the constrained propagator to `t_max` with the chosen engine and
/// returns (max amplitude deviation against the full space, total weight on
/// blockade-violating bitmasks).
pub fn deviation_from_full_space(
    params: &ChainParameters,
    t_max: f64,
    engine: Engine,
) -> (f64, f64) {
    let full = full_space_evolve(params, t_max);

    let sim = Simulator::new(params).unwrap();
    let traj = sim
        .run(
            params,
            t_max,
            t_max,
            &ObservableSet {
                keep_states: true,
                ..Default::default()
            },
            engine,
        )
        .unwrap();
    let constrained = traj.states.as_ref().unwrap().last().unwrap();

    let dim = full.len();
    let mut embedded = vec![Complex64::new(0.0, 0.0); dim];
    for (s, a) in sim.basis().states().iter().zip(constrained.amplitudes()) {
        embedded[s.bits() as usize] = *a;
    }
    let mut worst = 0.0f64;
    for (e, f) in embedded.iter().zip(&full) {
        worst = worst.max((e - f).norm());
    }
    let illegal: f64 = full
        .iter()
        .enumerate()
        .filter(|(b, _)| (*b as u32) & ((*b as u32) >> 1) != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    (worst, illegal)
}
