//! Self-consistent coherent amplitudes of the driven array and the enhanced
//! coupling g = G|α| they produce.

use num_complex::Complex64 as C64;

use crate::error::{finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// Rabi frequency Ω_d of the drive.
    pub rabi: f64,
    /// Vacuum optomechanical coupling G.
    pub g_vacuum: f64,
    /// Mechanical decay γ_m (the same rate as the bath Γ).
    pub gamma_m: f64,
    pub detuning: f64,
    pub j_hop: f64,
    pub k_hop: f64,
    pub omega_m: f64,
    pub kappa: f64,
    pub phase: f64,
}

impl DriveParams {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("Omega_d", self.rabi),
            ("G", self.g_vacuum),
            ("gamma_m", self.gamma_m),
            ("delta", self.detuning),
            ("J", self.j_hop),
            ("K", self.k_hop),
            ("omega_m", self.omega_m),
            ("kappa", self.kappa),
            ("theta", self.phase),
        ] {
            finite(name, v)?;
        }
        for (name, v) in [("Omega_d", self.rabi), ("G", self.g_vacuum), ("gamma_m", self.gamma_m)] {
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be >= 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// (Δ + iκ/2) + 2J cos θ, the optical denominator without the phonon shift.
    pub fn optical_denominator(&self) -> C64 {
        C64::new(self.detuning + 2.0 * self.j_hop * self.phase.cos(), 0.5 * self.kappa)
    }

    /// (ω_m − iγ_m/2) − 2K
    pub fn mechanical_denominator(&self) -> C64 {
        C64::new(self.omega_m - 2.0 * self.k_hop, -0.5 * self.gamma_m)
    }

    /// Right-hand side of the α equation for a given β.
    pub fn alpha_map(&self, beta: C64) -> Result<C64> {
        let den = self.optical_denominator() + 2.0 * self.g_vacuum * beta.re;
        if den.norm() == 0.0 {
            return Err(Error::Singular("optical denominator vanishes"));
        }
        Ok(self.rabi / den)
    }

    /// Right-hand side of the β equation for a given α.
    pub fn beta_map(&self, alpha: C64) -> Result<C64> {
        let den = self.mechanical_denominator();
        if den.norm() == 0.0 {
            return Err(Error::Singular("mechanical denominator vanishes"));
        }
        Ok(self.g_vacuum * alpha.norm_sqr() / den)
    }

    /// |α − F_α(β)| + |β − F_β(α)|
    pub fn residual(&self, alpha: C64, beta: C64) -> Result<f64> {
        Ok((alpha - self.alpha_map(beta)?).norm() + (beta - self.beta_map(alpha)?).norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldSolution {
    pub alpha: C64,
    pub beta: C64,
    /// G|α|
    pub g_enhanced: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_DAMPING: f64 = 0.5;

/// Damped fixed-point iteration of the coupled (α, β) equations.
///
/// Starts from the phonon-free amplitude α₀ = Ω_d / (Δ + iκ/2 + 2J cos θ),
/// β₀ = 0, so the G = 0 problem is solved by the first iterate. Each step
/// evaluates both maps at the current pair; when their combined residual is
/// at most `tol` the current pair is returned, otherwise the pair moves a
/// fraction `damping` of the way toward the mapped values.
pub fn solve_meanfield(drive: &DriveParams, tol: f64, max_iter: usize, damping: f64) -> Result<MeanFieldSolution> {
    drive.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be > 0, got {tol}"),
        });
    }
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "damping",
            reason: format!("must lie in (0, 1], got {damping}"),
        });
    }

    let mut alpha = drive.alpha_map(C64::new(0.0, 0.0))?;
    let mut beta = C64::new(0.0, 0.0);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next_alpha = drive.alpha_map(beta)?;
        let next_beta = drive.beta_map(alpha)?;
        residual = (next_alpha - alpha).norm() + (next_beta - beta).norm();
        if !residual.is_finite() {
            break;
        }
        if residual <= tol {
            return Ok(MeanFieldSolution {
                alpha,
                beta,
                g_enhanced: drive.g_vacuum * alpha.norm(),
                residual,
                iterations: it,
            });
        }
        alpha += damping * (next_alpha - alpha);
        beta += damping * (next_beta - beta);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual,
        alpha,
        beta,
    })
}
