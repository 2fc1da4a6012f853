//! Linear coupling ramp g → −g and the resulting hybrid-mode dynamics.
//!
//! The propagator of the bare modes in the frame rotating with the diagonal
//! of H_k is approximated by the exponential of the first two Magnus terms,
//! which for a linear ramp have closed forms:
//!
//! ```text
//! θ_M(t) = −∫₀ᵗ g(t′) e^{2iδt′} dt′
//! φ_M(t) =  ∫₀ᵗ dt₁ ∫₀^{t₁} dt₂ g(t₁) g(t₂) sin 2δ(t₁ − t₂)
//! S      = exp(i B),   B = [[−φ_M, θ_M], [θ_M*, φ_M]]
//! ```
//!
//! `S` is expressed for the conjugate amplitudes; the annihilation-operator
//! propagator is `S*`. Populations only involve |M_ij|², so both give the same
//! observables.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bands::{basis_unchecked, gap_extrema, ExtremumKind, DEFAULT_COARSE_POINTS, DEFAULT_REFINE_TOL};
use crate::error::{at_least, finite, Error, Result};
use crate::linalg::Propagator2;
use crate::model::{kd_grid, reduced_unchecked, BlochPoint, LatticeParams};

/// Below this value of |2δt| the Magnus integrals are summed as power series.
pub const SERIES_SWITCH: f64 = 0.5;

/// Default ratio between the quench duration and the inverse gap.
pub const DEFAULT_TQ_FACTOR: f64 = 1e-4;

/// g(t) = g0 (1 − 2t/t_q) on [0, t_q].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchSchedule {
    pub g0: f64,
    pub t_q: f64,
}

impl QuenchSchedule {
    pub fn new(g0: f64, t_q: f64) -> Result<Self> {
        finite("g", g0)?;
        finite("t_q", t_q)?;
        if t_q.is_nan() || t_q <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "t_q",
                reason: format!("must be > 0, got {t_q}"),
            });
        }
        Ok(Self { g0, t_q })
    }

    pub fn coupling_at(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.t_q).contains(&t) {
            return Err(Error::OutOfRange {
                name: "t",
                value: t,
                lo: 0.0,
                hi: self.t_q,
            });
        }
        Ok(self.g0 * (1.0 - 2.0 * t / self.t_q))
    }
}

pub fn coupling_schedule(s: &QuenchSchedule, t: f64) -> Result<f64> {
    s.coupling_at(t)
}

/// Steady-state occupations of the hybrid modes before the quench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPopulations {
    pub n_a: f64,
    pub n_b: f64,
}

/// Occupations of A_k and B_k set by the competition between optical decay κ
/// (weighted by photon content) and mechanical decay Γ (weighted by phonon
/// content), both expressed through the photon weight α_A of A_k.
pub fn thermal_populations(alpha_a: f64, params: &LatticeParams) -> Result<ThermalPopulations> {
    let p = params.validated()?;
    if !(0.0..=1.0).contains(&alpha_a) {
        return Err(Error::OutOfRange {
            name: "alpha_A",
            value: alpha_a,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if p.kappa + p.gamma == 0.0 {
        return Err(Error::Singular("kappa and Gamma both vanish"));
    }
    let a = alpha_a;
    let den_a = a * p.kappa + (1.0 - a) * p.gamma;
    let den_b = (1.0 - a) * p.kappa + a * p.gamma;
    if den_a == 0.0 || den_b == 0.0 {
        return Err(Error::Singular("bath denominator vanishes"));
    }
    Ok(ThermalPopulations {
        n_a: (1.0 - a) * p.gamma * p.n_th / den_a,
        n_b: a * p.gamma * p.n_th / den_b,
    })
}

/// The accumulated Magnus quantities at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnusTerms {
    pub theta_m: C64,
    pub phi_m: f64,
    pub eta: f64,
    /// Auxiliary combinations of the closed form of φ_M. At δ = 0 they take
    /// their limiting values (0, ζ, 0).
    pub xi_m: f64,
    pub zeta_m: f64,
    pub chi_m: f64,
}

pub fn magnus_theta(g0: f64, delta_half: f64, t_q: f64, t: f64) -> C64 {
    if (2.0 * delta_half * t).abs() < SERIES_SWITCH {
        theta_series(g0, delta_half, t_q, t)
    } else {
        theta_closed(g0, delta_half, t_q, t)
    }
}

pub fn magnus_phi(g0: f64, delta_half: f64, t_q: f64, t: f64) -> f64 {
    if (2.0 * delta_half * t).abs() < SERIES_SWITCH {
        phi_series(g0, delta_half, t_q, t)
    } else {
        phi_closed(g0, delta_half, t_q, t)
    }
}

pub fn magnus_terms(g0: f64, delta_half: f64, t_q: f64, t: f64) -> MagnusTerms {
    let theta_m = magnus_theta(g0, delta_half, t_q, t);
    let phi_m = magnus_phi(g0, delta_half, t_q, t);
    let (xi_m, zeta_m, chi_m) = auxiliaries(delta_half, t_q, t);
    MagnusTerms {
        theta_m,
        phi_m,
        eta: theta_m.norm().hypot(phi_m),
        xi_m,
        zeta_m,
        chi_m,
    }
}

/// e^{iz} − 1 without cancellation for small z.
fn expm1_i(z: f64) -> C64 {
    let h = (0.5 * z).sin();
    C64::new(-2.0 * h * h, z.sin())
}

pub(crate) fn theta_closed(g0: f64, d: f64, t_q: f64, t: f64) -> C64 {
    let i = C64::i();
    let z = 2.0 * d * t;
    let em1 = expm1_i(z);
    let e = C64::from_polar(1.0, z);
    g0 / (2.0 * d) * (i * em1 - 2.0 * i * t * e / t_q + em1 / (d * t_q))
}

pub(crate) fn theta_series(g0: f64, d: f64, t_q: f64, t: f64) -> C64 {
    // −g0 t Σ (2iδt)ⁿ/n! [1/(n+1) − 2s/(n+2)],  s = t/t_q
    let s = t / t_q;
    let iz = C64::new(0.0, 2.0 * d * t);
    let mut power = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..64 {
        let nf = n as f64;
        if n > 0 {
            power = power * iz / nf;
        }
        acc += power * (1.0 / (nf + 1.0) - 2.0 * s / (nf + 2.0));
        if n > 2 && power.norm() < 1e-18 {
            break;
        }
    }
    -g0 * t * acc
}

fn auxiliaries(d: f64, t_q: f64, t: f64) -> (f64, f64, f64) {
    let zeta = 0.5 * t * t - 2.0 * t * t * t / (3.0 * t_q);
    if d == 0.0 {
        return (0.0, zeta, 0.0);
    }
    let z = 2.0 * d * t;
    let (s, c) = z.sin_cos();
    let one_minus_cos = 2.0 * (0.5 * z).sin().powi(2);
    let xi = one_minus_cos + 2.0 * t / t_q * c - s / (t_q * d);
    let chi = t - t * t / t_q - s / (2.0 * d) + t * s / (t_q * d) - one_minus_cos / (2.0 * t_q * d * d);
    (xi, zeta, chi)
}

pub(crate) fn phi_closed(g0: f64, d: f64, t_q: f64, t: f64) -> f64 {
    let (xi, zeta, chi) = auxiliaries(d, t_q, t);
    let g2 = g0 * g0;
    g2 / (4.0 * t_q * d * d * d) * xi - g2 / (t_q * d) * zeta + g2 / (2.0 * d) * chi
}

pub(crate) fn phi_series(g0: f64, d: f64, t_q: f64, t: f64) -> f64 {
    // g0² t² Σ_{m odd} (−1)^{(m−1)/2} z^m/m! · [1 − 2s + 4s²/(m+4)] / ((m+1)(m+2))
    let s = t / t_q;
    let z = 2.0 * d * t;
    let mut power = z; // z^m / m!
    let mut acc = 0.0;
    let mut m = 1usize;
    loop {
        let mf = m as f64;
        acc += power * (1.0 - 2.0 * s + 4.0 * s * s / (mf + 4.0)) / ((mf + 1.0) * (mf + 2.0));
        power *= -z * z / ((mf + 1.0) * (mf + 2.0));
        m += 2;
        if m > 61 || power.abs() < 1e-18 * acc.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    g0 * g0 * t * t * acc
}

/// S = cos η · I + i (sin η / η) · B with B = [[−φ, θ], [θ*, φ]].
pub fn propagator_from_terms(theta_m: C64, phi_m: f64) -> Propagator2 {
    let i = C64::i();
    let eta = theta_m.norm().hypot(phi_m);
    let sinc = if eta < 1e-4 {
        let e2 = eta * eta;
        1.0 - e2 / 6.0 + e2 * e2 / 120.0
    } else {
        eta.sin() / eta
    };
    let c = C64::new(eta.cos(), 0.0);
    Propagator2([
        [c - i * phi_m * sinc, i * theta_m * sinc],
        [i * theta_m.conj() * sinc, c + i * phi_m * sinc],
    ])
}

pub fn magnus_propagator(g0: f64, delta_half: f64, t_q: f64, t: f64) -> Propagator2 {
    propagator_from_terms(magnus_theta(g0, delta_half, t_q, t), magnus_phi(g0, delta_half, t_q, t))
}

/// M = R(g(t)) · S(t) · Rᵀ(g(0)): maps the initial hybrid modes onto the
/// hybrid modes of the instantaneous Hamiltonian.
pub fn quench_map(params: &LatticeParams, k: BlochPoint, s: &QuenchSchedule, t: f64) -> Result<Propagator2> {
    let p = params.validated()?;
    let g_t = s.coupling_at(t)?;
    let kd = k.kd();
    let r0 = basis_unchecked(&p.with_coupling(s.g0), kd)?.rotation();
    let rt = basis_unchecked(&p.with_coupling(g_t), kd)?.rotation();
    let d = reduced_unchecked(&p, kd).delta_half;
    let sk = magnus_propagator(s.g0, d, s.t_q, t);
    Ok(rt.to_complex() * sk * r0.transpose().to_complex())
}

/// Normalized occupations (N_A, N_B) after the map `m`, for an initial state
/// diagonal in the hybrid basis.
pub fn mode_populations(m: &Propagator2, th: &ThermalPopulations, n_th: f64) -> (f64, f64) {
    let w = m.abs_sq();
    (
        (w[0][0] * th.n_a + w[0][1] * th.n_b) / n_th,
        (w[1][0] * th.n_a + w[1][1] * th.n_b) / n_th,
    )
}

/// Populations minus their thermal values, normalized by n_th.
pub fn net_excitations(n_a: f64, n_b: f64, th: &ThermalPopulations, n_th: f64) -> (f64, f64) {
    (n_a - th.n_a / n_th, n_b - th.n_b / n_th)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchRecord {
    pub kd: f64,
    pub t: f64,
    pub t_q: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub nq_a: f64,
    pub nq_b: f64,
}

fn record(p: &LatticeParams, kd: f64, s: &QuenchSchedule, t: f64, th: &ThermalPopulations) -> Result<QuenchRecord> {
    let m = quench_map(p, BlochPoint::new(kd)?, s, t)?;
    let (n_a, n_b) = mode_populations(&m, th, 1.0);
    let (nq_a, nq_b) = net_excitations(n_a, n_b, th, 1.0);
    Ok(QuenchRecord {
        kd,
        t,
        t_q: s.t_q,
        n_a,
        n_b,
        nq_a,
        nq_b,
    })
}

/// Occupations per unit n_th, so scan outputs carry no trace of n_th.
fn initial_thermal(p: &LatticeParams, kd: f64, g0: f64) -> Result<ThermalPopulations> {
    let b = basis_unchecked(&p.with_coupling(g0), kd)?;
    thermal_populations(b.alpha_a, &LatticeParams { n_th: 1.0, ..*p })
}

/// Populations at `n_t` uniformly spaced instants of [0, t_q] at fixed kd.
pub fn quench_trace(
    params: &LatticeParams,
    k: BlochPoint,
    s: &QuenchSchedule,
    n_t: usize,
) -> Result<Vec<QuenchRecord>> {
    at_least("n_t", n_t, 2)?;
    let p = params.validated()?;
    let th = initial_thermal(&p, k.kd(), s.g0)?;
    (0..n_t)
        .into_par_iter()
        .map(|i| {
            let t = if i == n_t - 1 {
                s.t_q
            } else {
                s.t_q * i as f64 / (n_t - 1) as f64
            };
            record(&p, k.kd(), s, t, &th)
        })
        .collect()
}

/// How the quench duration is chosen at each wavenumber of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuenchTime {
    /// t_q = factor / Δω_k at each kd.
    PerPoint { factor: f64 },
    /// t_q = factor / min_k Δω_k, shared by all kd.
    GlobalMinGap { factor: f64 },
    /// The same t_q everywhere.
    Fixed(f64),
}

impl Default for QuenchTime {
    fn default() -> Self {
        QuenchTime::PerPoint {
            factor: DEFAULT_TQ_FACTOR,
        }
    }
}

fn inverse_gap(factor: f64, gap: f64) -> Result<f64> {
    let t_q = factor / gap;
    if !(t_q.is_finite() && t_q > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_q",
            reason: format!("cannot derive a quench time from gap {gap} and factor {factor}"),
        });
    }
    Ok(t_q)
}

/// Schedule used at `kd` under `rule`, starting from the coupling in `params`.
pub fn schedule_for(params: &LatticeParams, kd: f64, rule: QuenchTime) -> Result<QuenchSchedule> {
    let p = params.validated()?;
    let t_q = match rule {
        QuenchTime::PerPoint { factor } => inverse_gap(factor, reduced_unchecked(&p, kd).gap)?,
        QuenchTime::GlobalMinGap { factor } => inverse_gap(factor, minimum_gap(&p)?)?,
        QuenchTime::Fixed(t_q) => t_q,
    };
    QuenchSchedule::new(p.coupling, t_q)
}

fn minimum_gap(p: &LatticeParams) -> Result<f64> {
    let ex = gap_extrema(p, DEFAULT_COARSE_POINTS, DEFAULT_REFINE_TOL)?;
    Ok(ex
        .iter()
        .filter(|e| e.kind != ExtremumKind::Maximum)
        .map(|e| e.gap)
        .fold(f64::INFINITY, f64::min))
}

/// Populations and net excitations at the end of the quench (t = t_q) on a
/// uniform kd grid, in ascending kd.
pub fn quench_scan(params: &LatticeParams, rule: QuenchTime, n_k: usize) -> Result<Vec<QuenchRecord>> {
    let p = params.validated()?;
    let grid = kd_grid(n_k)?;
    let shared = match rule {
        QuenchTime::GlobalMinGap { factor } => Some(QuenchTime::Fixed(inverse_gap(factor, minimum_gap(&p)?)?)),
        _ => None,
    };
    let rule = shared.unwrap_or(rule);
    grid.par_iter()
        .map(|k| {
            let kd = k.kd();
            let s = schedule_for(&p, kd, rule)?;
            let th = initial_thermal(&p, kd, s.g0)?;
            record(&p, kd, &s, s.t_q, &th)
        })
        .collect()
}

/// Location of the largest |Nq_A| in each half of the zone (kd < 0, kd ≥ 0).
pub fn excitation_peaks(records: &[QuenchRecord]) -> (Option<f64>, Option<f64>) {
    let best = |half: &dyn Fn(f64) -> bool| {
        records
            .iter()
            .filter(|r| half(r.kd))
            .max_by(|a, b| a.nq_a.abs().total_cmp(&b.nq_a.abs()))
            .map(|r| r.kd)
    };
    (best(&|kd| kd < 0.0), best(&|kd| (0.0..PI).contains(&kd)))
}
