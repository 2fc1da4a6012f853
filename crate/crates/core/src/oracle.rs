//! Brute-force reference computations.
//!
//! * A fixed-step RK4 integration of the interaction-picture equations of
//!   motion, against which the closed-form Magnus propagator is compared.
//! * Exact diagonalization of the finite periodic ring in real space,
//!   against which the Bloch reduction is compared.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::bands::band_energies;
use crate::error::{at_least, Error, Result};
use crate::linalg::{HermitianMatrix, Propagator2};
use crate::model::{reduced_unchecked, BlochPoint, LatticeParams};
use crate::quench::{magnus_propagator, QuenchSchedule};

/// Estimated RK4 error above which a report is flagged as under-resolved.
pub const TARGET_ERROR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationReport {
    /// Propagator of the annihilation operators (a_k, b_k) in the
    /// interaction picture at t = t_q.
    pub propagator: Propagator2,
    pub steps: usize,
    /// Richardson estimate ‖U_n − U_2n‖ / 15.
    pub error_estimate: f64,
    /// max |U − S*| with S the closed-form Magnus propagator.
    pub magnus_deviation: f64,
    /// max |U U† − I|
    pub unitarity_defect: f64,
    pub under_resolved: bool,
}

/// Integrates i dU/dt = V(t) U, U(0) = I, with
/// V(t) = [[0, −g(t) e^{−2iδt}], [−g(t) e^{2iδt}, 0]], by classic RK4 on a
/// uniform grid of `n_steps` steps over [0, duration].
pub fn integrate_coupling(
    coupling: impl Fn(f64) -> f64,
    delta_half: f64,
    duration: f64,
    n_steps: usize,
) -> Propagator2 {
    let h = duration / n_steps as f64;
    let rhs = |t: f64, u: &Propagator2| -> Propagator2 {
        let g = coupling(t);
        let ph = C64::from_polar(1.0, 2.0 * delta_half * t);
        let mi = C64::new(0.0, -1.0);
        // −i V U
        let v12 = -g * ph.conj();
        let v21 = -g * ph;
        let m = &u.0;
        Propagator2([
            [mi * v12 * m[1][0], mi * v12 * m[1][1]],
            [mi * v21 * m[0][0], mi * v21 * m[0][1]],
        ])
    };
    let mut u = Propagator2::identity();
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    for n in 0..n_steps {
        let t = h * n as f64;
        let k1 = rhs(t, &u);
        let k2 = rhs(t + 0.5 * h, &u.scale_add(half, &k1));
        let k3 = rhs(t + 0.5 * h, &u.scale_add(half, &k2));
        let k4 = rhs(t + h, &u.scale_add(full, &k3));
        let sixth = C64::new(h / 6.0, 0.0);
        let two = C64::new(2.0, 0.0);
        u = u
            .scale_add(sixth, &k1)
            .scale_add(sixth * two, &k2)
            .scale_add(sixth * two, &k3)
            .scale_add(sixth, &k4);
    }
    u
}

/// RK4 oracle for the linear ramp at one Bloch point.
pub fn integrate_interaction_picture(
    params: &LatticeParams,
    k: BlochPoint,
    s: &QuenchSchedule,
    n_steps: usize,
) -> Result<IntegrationReport> {
    at_least("n_steps", n_steps, 16)?;
    let p = params.validated()?;
    let d = reduced_unchecked(&p, k.kd()).delta_half;
    let ramp = |t: f64| s.g0 * (1.0 - 2.0 * t / s.t_q);
    let u = integrate_coupling(ramp, d, s.t_q, n_steps);
    let u2 = integrate_coupling(ramp, d, s.t_q, 2 * n_steps);
    let error_estimate = u.max_abs_diff(&u2) / 15.0;
    let magnus = magnus_propagator(s.g0, d, s.t_q, s.t_q).conj();
    Ok(IntegrationReport {
        propagator: u,
        steps: n_steps,
        error_estimate,
        magnus_deviation: u.max_abs_diff(&magnus),
        unitarity_defect: u.unitarity_defect(),
        under_resolved: error_estimate > TARGET_ERROR,
    })
}

/// Ratio ‖U_n − U_2n‖ / ‖U_2n − U_4n‖; close to 16 for a fourth-order method.
pub fn step_halving_ratio(params: &LatticeParams, k: BlochPoint, s: &QuenchSchedule, n_steps: usize) -> Result<f64> {
    at_least("n_steps", n_steps, 16)?;
    let p = params.validated()?;
    let d = reduced_unchecked(&p, k.kd()).delta_half;
    let ramp = |t: f64| s.g0 * (1.0 - 2.0 * t / s.t_q);
    let u1 = integrate_coupling(ramp, d, s.t_q, n_steps);
    let u2 = integrate_coupling(ramp, d, s.t_q, 2 * n_steps);
    let u4 = integrate_coupling(ramp, d, s.t_q, 4 * n_steps);
    Ok(u1.max_abs_diff(&u2) / u2.max_abs_diff(&u4))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpectrum {
    pub n_sites: usize,
    pub phase: f64,
    /// Ascending, length 2·n_sites.
    pub eigenvalues: Vec<f64>,
}

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_SWEEPS: usize = 100;

/// Spectrum of the real-space ring of `n_sites` cells with drive phase
/// θ = 2πm/N and periodic boundaries.
///
/// Site n carries a photon (index 2n) and a phonon (index 2n+1) with
/// energies −Δ and ω_m, nearest-neighbour hoppings −J and −K, and on-site
/// coupling −g e^{−inθ}. The winding must be commensurate for the coupling
/// phase to be single-valued around the ring.
pub fn finite_lattice_spectrum(params: &LatticeParams, n_sites: usize, winding: i64) -> Result<LatticeSpectrum> {
    at_least("N_sites", n_sites, 2)?;
    let p = params.validated()?;
    let n = n_sites;
    let theta = 2.0 * PI * winding as f64 / n as f64;
    let mut h = HermitianMatrix::zeros(2 * n);
    for site in 0..n {
        let next = (site + 1) % n;
        let a = 2 * site;
        let b = 2 * site + 1;
        h.add_hermitian(a, a, C64::new(-p.detuning, 0.0));
        h.add_hermitian(b, b, C64::new(p.omega_m, 0.0));
        h.add_hermitian(a, 2 * next, C64::new(-p.j_hop, 0.0));
        h.add_hermitian(b, 2 * next + 1, C64::new(-p.k_hop, 0.0));
        // reduce n·θ mod 2π through the integer winding to keep the phase exact
        let turns = (site as i64 * winding).rem_euclid(n as i64);
        let phase = -2.0 * PI * turns as f64 / n as f64;
        h.add_hermitian(a, b, -p.coupling * C64::from_polar(1.0, phase));
    }
    let eigenvalues = h
        .eigenvalues_jacobi(JACOBI_TOL, JACOBI_SWEEPS)
        .ok_or(Error::Singular("Jacobi sweeps did not converge"))?;
    Ok(LatticeSpectrum {
        n_sites: n,
        phase: theta,
        eigenvalues,
    })
}

/// Same as [`finite_lattice_spectrum`] but takes θ from `params`, rejecting
/// phases that are not an integer multiple of 2π/N.
pub fn finite_lattice_spectrum_for_phase(params: &LatticeParams, n_sites: usize) -> Result<LatticeSpectrum> {
    at_least("N_sites", n_sites, 2)?;
    let x = params.phase * n_sites as f64 / (2.0 * PI);
    let m = x.round();
    if (x - m).abs() > 1e-9 {
        return Err(Error::Incommensurate {
            theta: params.phase,
            n_sites,
        });
    }
    finite_lattice_spectrum(params, n_sites, m as i64)
}

/// Analytic band energies on the N-point Bloch grid kd_j = 2πj/N at phase
/// θ = 2πm/N, sorted ascending.
pub fn bloch_multiset(params: &LatticeParams, n_sites: usize, winding: i64) -> Result<Vec<f64>> {
    at_least("N_sites", n_sites, 2)?;
    let p = params.with_phase(2.0 * PI * winding as f64 / n_sites as f64);
    let mut out = Vec::with_capacity(2 * n_sites);
    for j in 0..n_sites {
        let mut kd = 2.0 * PI * j as f64 / n_sites as f64;
        if kd > PI {
            kd -= 2.0 * PI;
        }
        let (wp, wm) = band_energies(&p, BlochPoint::new(kd)?)?;
        out.push(wp);
        out.push(wm);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// max |λ_lattice − λ_bloch| over the sorted spectra.
pub fn lattice_bloch_deviation(params: &LatticeParams, n_sites: usize, winding: i64) -> Result<f64> {
    let lattice = finite_lattice_spectrum(params, n_sites, winding)?;
    let bloch = bloch_multiset(params, n_sites, winding)?;
    Ok(lattice
        .eigenvalues
        .iter()
        .zip(&bloch)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn no_coupling_no_evolution() {
        let p = LatticeParams::strong_hopping().with_coupling(0.0);
        let s = QuenchSchedule::new(0.0, 3.0).unwrap();
        let r = integrate_interaction_picture(&p, BlochPoint::new(0.2).unwrap(), &s, 64).unwrap();
        assert_eq!(r.propagator, Propagator2::identity());
    }

    #[test]
    fn constant_coupling_rabi_rotation() {
        let (g, tau) = (0.7, 2.3);
        let u = integrate_coupling(|_| g, 0.0, tau, 2000);
        let x = g * tau;
        let expect = Propagator2([
            [C64::new(x.cos(), 0.0), C64::new(0.0, x.sin())],
            [C64::new(0.0, x.sin()), C64::new(x.cos(), 0.0)],
        ]);
        assert!(u.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn rejects_too_few_steps() {
        let p = LatticeParams::strong_hopping();
        let s = QuenchSchedule::new(0.1, 1.0).unwrap();
        assert!(integrate_interaction_picture(&p, BlochPoint::new(0.0).unwrap(), &s, 8).is_err());
    }

    #[test]
    fn flags_coarse_integration() {
        let p = LatticeParams::strong_hopping();
        let s = QuenchSchedule::new(0.1, 200.0).unwrap();
        let r = integrate_interaction_picture(&p, BlochPoint::new(0.0).unwrap(), &s, 16).unwrap();
        assert!(r.under_resolved);
    }

    #[test]
    fn decoupled_rings() {
        let p = LatticeParams::strong_hopping().with_coupling(0.0);
        let ring = finite_lattice_spectrum(&p, 8, 0).unwrap();
        let mut expect = Vec::new();
        for j in 0..8 {
            let c = (2.0 * PI * j as f64 / 8.0).cos();
            expect.push(-p.detuning - 2.0 * p.j_hop * c);
            expect.push(p.omega_m - 2.0 * p.k_hop * c);
        }
        expect.sort_by(f64::total_cmp);
        for (a, b) in ring.eigenvalues.iter().zip(&expect) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_site_ring() {
        // N = 2, m = 0: kd ∈ {0, π}; each block [[−Δ ∓ 2J, −g], [−g, ω_m ∓ 2K]].
        let p = LatticeParams::strong_hopping();
        let ring = finite_lattice_spectrum(&p, 2, 0).unwrap();
        let mut expect = Vec::new();
        for sgn in [1.0, -1.0] {
            let a = -p.detuning - sgn * 2.0 * p.j_hop;
            let b = p.omega_m - sgn * 2.0 * p.k_hop;
            let mid = 0.5 * (a + b);
            let half = (0.25 * (a - b) * (a - b) + p.coupling * p.coupling).sqrt();
            expect.push(mid + half);
            expect.push(mid - half);
        }
        expect.sort_by(f64::total_cmp);
        for (a, b) in ring.eigenvalues.iter().zip(&expect) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn incommensurate_phase_rejected() {
        let p = LatticeParams::strong_hopping().with_phase(0.3);
        assert!(matches!(
            finite_lattice_spectrum_for_phase(&p, 8),
            Err(Error::Incommensurate { .. })
        ));
        let p = LatticeParams::strong_hopping().with_phase(PI / 4.0);
        assert!(finite_lattice_spectrum_for_phase(&p, 8).is_ok());
    }
}
