//! Closed-form eigen system of the 2×2 Bloch Hamiltonian: band energies,
//! hybrid photon/phonon modes and the wavenumber dependence of the gap.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{at_least, Error, Result};
use crate::linalg::Rotation2;
use crate::model::{kd_grid, reduced_unchecked, BlochPoint, LatticeParams, ReducedCoeffs};

/// Band energies (ω₊, ω₋) with ω₊ ≥ ω₋.
pub fn band_energies(params: &LatticeParams, k: BlochPoint) -> Result<(f64, f64)> {
    let p = params.validated()?;
    Ok(energies_of(&reduced_unchecked(&p, k.kd())))
}

fn energies_of(c: &ReducedCoeffs) -> (f64, f64) {
    let centre = 0.5 * (c.omega - c.xi);
    (centre + c.r, centre - c.r)
}

/// Eigen decomposition of H_k in terms of the hybrid modes A_k (upper band)
/// and B_k (lower band).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridBasis {
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// Photon amplitude of A_k.
    pub u_a: f64,
    /// Phonon amplitude of A_k.
    pub v_a: f64,
    pub u_b: f64,
    pub v_b: f64,
    /// Photon weight of A_k.
    pub alpha_a: f64,
    /// Phonon weight of A_k.
    pub beta_a: f64,
    pub alpha_b: f64,
    pub beta_b: f64,
}

impl HybridBasis {
    /// Orthogonal matrix with rows (u_A, v_A) and (u_B, v_B); maps (a_k, b_k)
    /// to (A_k, B_k).
    pub fn rotation(&self) -> Rotation2 {
        Rotation2([[self.u_a, self.v_a], [self.u_b, self.v_b]])
    }

    pub fn gap(&self) -> f64 {
        self.omega_plus - self.omega_minus
    }
}

pub fn hybrid_basis(params: &LatticeParams, k: BlochPoint) -> Result<HybridBasis> {
    let p = params.validated()?;
    basis_unchecked(&p, k.kd())
}

pub(crate) fn basis_unchecked(p: &LatticeParams, kd: f64) -> Result<HybridBasis> {
    let c = reduced_unchecked(p, kd);
    basis_from_coeffs(p.coupling, &c).ok_or(Error::DegenerateBasis { kd })
}

fn basis_from_coeffs(g: f64, c: &ReducedCoeffs) -> Option<HybridBasis> {
    let d = c.delta_half;
    let r = c.r;
    let (omega_plus, omega_minus) = energies_of(c);

    let (u_a, v_a, u_b, v_b) = if g == 0.0 {
        // Limit g → 0⁺: A_k follows the phonon for δ > 0 and the photon for δ < 0.
        if d > 0.0 {
            (-0.0, 1.0, -1.0, -0.0)
        } else if d < 0.0 {
            (-1.0, 0.0, -0.0, -1.0)
        } else {
            return None;
        }
    } else {
        // δ ± r evaluated without cancellation on the adverse branch.
        let plus = if d >= 0.0 { d + r } else { g * g / (r - d) };
        let minus = if d <= 0.0 { d - r } else { -(g * g) / (r + d) };
        let n_plus = g.hypot(plus);
        let n_minus = g.hypot(minus);
        (-g / n_plus, plus / n_plus, -g / n_minus, minus / n_minus)
    };

    Some(HybridBasis {
        omega_plus,
        omega_minus,
        u_a,
        v_a,
        u_b,
        v_b,
        alpha_a: u_a * u_a,
        beta_a: v_a * v_a,
        alpha_b: u_b * u_b,
        beta_b: v_b * v_b,
    })
}

/// One row of a dispersion scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRow {
    pub kd: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub gap: f64,
    pub alpha_a: f64,
    pub beta_a: f64,
    pub alpha_b: f64,
    pub beta_b: f64,
}

/// Bands and weights on a uniform grid over [−π, π], endpoints included,
/// in ascending kd.
///
/// At an exactly degenerate point (g = 0, δ = 0) the weights are reported as
/// NaN; the energies are still well defined.
pub fn band_scan(params: &LatticeParams, n_k: usize) -> Result<Vec<BandRow>> {
    let p = params.validated()?;
    let grid = kd_grid(n_k)?;
    Ok(grid
        .par_iter()
        .map(|k| {
            let kd = k.kd();
            let c = reduced_unchecked(&p, kd);
            let (omega_plus, omega_minus) = energies_of(&c);
            let (alpha_a, beta_a, alpha_b, beta_b) = match basis_from_coeffs(p.coupling, &c) {
                Some(b) => (b.alpha_a, b.beta_a, b.alpha_b, b.beta_b),
                None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            };
            BandRow {
                kd,
                omega_plus,
                omega_minus,
                gap: c.gap,
                alpha_a,
                beta_a,
                alpha_b,
                beta_b,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
    /// The gap does not depend on kd (J = K = 0).
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapExtremum {
    pub kd: f64,
    pub gap: f64,
    pub kind: ExtremumKind,
}

pub const DEFAULT_COARSE_POINTS: usize = 1024;
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;

/// Locates every local minimum and maximum of Δω_k over the periodic zone.
///
/// A uniform scan over [−π, π) brackets each extremum between the
/// neighbours of a discrete extremum; golden-section search then narrows the
/// bracket to `refine_tol` in kd. Locations are wrapped to [−π, π) and
/// returned in ascending order.
pub fn gap_extrema(params: &LatticeParams, n_coarse: usize, refine_tol: f64) -> Result<Vec<GapExtremum>> {
    let p = params.validated()?;
    at_least("n_k_coarse", n_coarse, 64)?;
    if refine_tol.is_nan() || refine_tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "refine_tol",
            reason: format!("must be > 0, got {refine_tol}"),
        });
    }
    let gap = |kd: f64| reduced_unchecked(&p, kd).gap;
    let h = 2.0 * PI / n_coarse as f64;
    let values: Vec<f64> = (0..n_coarse).map(|i| gap(-PI + h * i as f64)).collect();

    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-14 * hi.abs().max(1.0) {
        return Ok(vec![GapExtremum {
            kd: 0.0,
            gap: values[0],
            kind: ExtremumKind::Flat,
        }]);
    }

    let mut out = Vec::new();
    for i in 0..n_coarse {
        let prev = values[(i + n_coarse - 1) % n_coarse];
        let next = values[(i + 1) % n_coarse];
        let here = values[i];
        let kind = if here < prev && here <= next {
            ExtremumKind::Minimum
        } else if here > prev && here >= next {
            ExtremumKind::Maximum
        } else {
            continue;
        };
        let centre = -PI + h * i as f64;
        let sign = if kind == ExtremumKind::Minimum { 1.0 } else { -1.0 };
        let kd = golden_section(|x| sign * gap(x), centre - h, centre + h, refine_tol);
        out.push(GapExtremum {
            kd: wrap_zone(kd),
            gap: gap(kd),
            kind,
        });
    }
    out.sort_by(|a, b| a.kd.total_cmp(&b.kd));
    Ok(out)
}

fn wrap_zone(kd: f64) -> f64 {
    if kd < -PI {
        kd + 2.0 * PI
    } else if kd >= PI {
        kd - 2.0 * PI
    } else {
        kd
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
