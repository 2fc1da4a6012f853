//! Physical parameters of the driven array and the per-wavenumber Bloch
//! Hamiltonian.
//!
//! All frequencies are angular frequencies in rad/ns and times are in ns, so
//! products like `ω t` are plain phases. The wavenumber only ever enters as
//! the dimensionless product `kd`.

use std::f64::consts::PI;

use crate::error::{finite, Error, Result};

/// Static parameters of the optomechanical array and its thermal bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    /// Mechanical frequency ω_m.
    pub omega_m: f64,
    /// Laser detuning Δ = ω_d − ω_c, usually negative (red side).
    pub detuning: f64,
    /// Optical hopping J between neighbouring cavities.
    pub j_hop: f64,
    /// Mechanical hopping K between neighbouring resonators.
    pub k_hop: f64,
    /// Enhanced optomechanical coupling g. Real; the sign is meaningful.
    pub coupling: f64,
    /// Phase gradient θ of the drive, kept in (−π, π].
    pub phase: f64,
    /// Optical decay rate κ.
    pub kappa: f64,
    /// Mechanical decay rate Γ.
    pub gamma: f64,
    /// Thermal occupation of the mechanical bath.
    pub n_th: f64,
}

impl LatticeParams {
    /// Regime with hopping stronger than the coupling (J, K > g), red-detuned
    /// by one mechanical frequency. Bath values are the documented defaults.
    pub fn strong_hopping() -> Self {
        Self {
            omega_m: 4.3,
            detuning: -4.3,
            j_hop: 0.5,
            k_hop: 0.2,
            coupling: 0.1,
            phase: 0.0,
            kappa: 0.1,
            gamma: 0.001,
            n_th: 100.0,
        }
    }

    /// Regime with hopping weaker than the coupling (J, K < g).
    pub fn weak_hopping() -> Self {
        Self {
            j_hop: 0.043,
            k_hop: 0.0013,
            coupling: 0.086,
            ..Self::strong_hopping()
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = normalize_phase(phase);
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_bath(mut self, kappa: f64, gamma: f64, n_th: f64) -> Self {
        self.kappa = kappa;
        self.gamma = gamma;
        self.n_th = n_th;
        self
    }

    /// Checks every invariant and returns a copy with the phase normalized.
    pub fn validated(&self) -> Result<Self> {
        finite("omega_m", self.omega_m)?;
        finite("delta", self.detuning)?;
        finite("J", self.j_hop)?;
        finite("K", self.k_hop)?;
        finite("g", self.coupling)?;
        finite("theta", self.phase)?;
        finite("kappa", self.kappa)?;
        finite("Gamma", self.gamma)?;
        finite("n_th", self.n_th)?;
        positive("omega_m", self.omega_m)?;
        non_negative("J", self.j_hop)?;
        non_negative("K", self.k_hop)?;
        non_negative("kappa", self.kappa)?;
        non_negative("Gamma", self.gamma)?;
        positive("n_th", self.n_th)?;
        Ok(Self {
            phase: normalize_phase(self.phase),
            ..*self
        })
    }
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self::strong_hopping()
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be > 0, got {v}"),
        })
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be >= 0, got {v}"),
        })
    }
}

/// Maps a phase into (−π, π]. Values already in range are returned bit-for-bit.
pub fn normalize_phase(phase: f64) -> f64 {
    if phase > -PI && phase <= PI {
        return phase;
    }
    let t = phase.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// A point `kd` of the first Brillouin zone.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BlochPoint(f64);

impl BlochPoint {
    pub fn new(kd: f64) -> Result<Self> {
        finite("kd", kd)?;
        let lim = PI * (1.0 + 1e-12);
        if kd.abs() > lim {
            return Err(Error::OutOfRange {
                name: "kd",
                value: kd,
                lo: -PI,
                hi: PI,
            });
        }
        Ok(Self(kd))
    }

    /// Builds a point from `kd / π`.
    pub fn from_fraction_of_pi(x: f64) -> Result<Self> {
        Self::new(x * PI)
    }

    pub fn kd(self) -> f64 {
        self.0
    }
}

/// Uniform grid over [−π, π] with both endpoints included.
pub fn kd_grid(n: usize) -> Result<Vec<BlochPoint>> {
    crate::error::at_least("n_k", n, 2)?;
    let step = 2.0 * PI / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let kd = if i == n - 1 { PI } else { -PI + step * i as f64 };
            BlochPoint(kd)
        })
        .collect())
}

/// Scalars derived from the Bloch Hamiltonian at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCoeffs {
    /// Ω = ω_m − 2K cos(kd)
    pub omega: f64,
    /// ξ = Δ + 2J cos(kd + θ)
    pub xi: f64,
    /// δ = (Ω + ξ)/2
    pub delta_half: f64,
    /// r = √(g² + δ²)
    pub r: f64,
    /// Δω_k = 2r
    pub gap: f64,
}

/// Real symmetric 2×2 Hamiltonian in the (photon, phonon) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochHamiltonian {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl BlochHamiltonian {
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.h11, self.h12], [self.h12, self.h22]]
    }

    pub fn trace(&self) -> f64 {
        self.h11 + self.h22
    }
}

pub fn reduced_coeffs(params: &LatticeParams, k: BlochPoint) -> Result<ReducedCoeffs> {
    let p = params.validated()?;
    Ok(reduced_unchecked(&p, k.kd()))
}

pub(crate) fn reduced_unchecked(p: &LatticeParams, kd: f64) -> ReducedCoeffs {
    let omega = p.omega_m - 2.0 * p.k_hop * kd.cos();
    let xi = p.detuning + 2.0 * p.j_hop * (kd + p.phase).cos();
    let delta_half = 0.5 * (omega + xi);
    let r = p.coupling.hypot(delta_half);
    ReducedCoeffs {
        omega,
        xi,
        delta_half,
        r,
        gap: 2.0 * r,
    }
}

pub fn bloch_hamiltonian(params: &LatticeParams, k: BlochPoint) -> Result<BlochHamiltonian> {
    let p = params.validated()?;
    let kd = k.kd();
    Ok(BlochHamiltonian {
        h11: -p.detuning - 2.0 * p.j_hop * (kd + p.phase).cos(),
        h12: -p.coupling,
        h22: p.omega_m - 2.0 * p.k_hop * kd.cos(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(kd: f64) -> BlochPoint {
        BlochPoint::new(kd).unwrap()
    }

    #[test]
    fn coefficients_at_avoided_crossing() {
        let c = reduced_coeffs(&LatticeParams::strong_hopping(), pt(PI / 2.0)).unwrap();
        assert_relative_eq!(c.omega, 4.3, epsilon = 1e-14);
        assert_relative_eq!(c.xi, -4.3, epsilon = 1e-14);
        assert!(c.delta_half.abs() < 1e-14);
        assert_relative_eq!(c.gap, 0.2, epsilon = 1e-14);
    }

    #[test]
    fn coefficients_at_zone_centre() {
        let c = reduced_coeffs(&LatticeParams::strong_hopping(), pt(0.0)).unwrap();
        assert_relative_eq!(c.omega, 3.9, epsilon = 1e-14);
        assert_relative_eq!(c.xi, -3.3, epsilon = 1e-14);
        assert_relative_eq!(c.delta_half, 0.3, epsilon = 1e-14);
        assert_relative_eq!(c.gap, 2.0 * 0.1f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(c.gap, 0.63246, epsilon = 1e-5);
    }

    #[test]
    fn decoupled_gap_is_twice_detuning() {
        let p = LatticeParams::strong_hopping().with_coupling(0.0);
        for kd in [-2.0, -0.3, 0.0, 1.1, 3.0] {
            let c = reduced_coeffs(&p, pt(kd)).unwrap();
            assert_eq!(c.gap, 2.0 * c.delta_half.abs());
        }
    }

    #[test]
    fn hamiltonian_entries() {
        let p = LatticeParams::strong_hopping();
        let h = bloch_hamiltonian(&p, pt(PI / 2.0)).unwrap();
        assert_relative_eq!(h.h11, 4.3, epsilon = 1e-14);
        assert_relative_eq!(h.h22, 4.3, epsilon = 1e-14);
        assert_eq!(h.h12, -0.1);

        let h = bloch_hamiltonian(&p.with_coupling(0.0), pt(0.0)).unwrap();
        assert_relative_eq!(h.h11, 3.3, epsilon = 1e-14);
        assert_relative_eq!(h.h22, 3.9, epsilon = 1e-14);
        assert_eq!(h.h12, 0.0);

        let h = bloch_hamiltonian(&p.with_phase(PI), pt(0.0)).unwrap();
        assert_relative_eq!(h.h11, 5.3, epsilon = 1e-14);
        assert_relative_eq!(h.h22, 3.9, epsilon = 1e-14);
    }

    #[test]
    fn hamiltonian_consistent_with_coefficients() {
        let p = LatticeParams::weak_hopping().with_phase(0.7);
        let k = pt(-1.3);
        let h = bloch_hamiltonian(&p, k).unwrap();
        let c = reduced_coeffs(&p, k).unwrap();
        assert_eq!(h.h11, -c.xi);
        assert_eq!(h.h22, c.omega);
        assert_relative_eq!(h.trace(), c.omega - c.xi, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut p = LatticeParams::strong_hopping();
        p.n_th = -1.0;
        assert!(matches!(
            p.validated(),
            Err(Error::InvalidParameter { name: "n_th", .. })
        ));
        let mut p = LatticeParams::strong_hopping();
        p.coupling = f64::NAN;
        assert!(reduced_coeffs(&p, pt(0.0)).is_err());
        assert!(BlochPoint::new(4.0).is_err());
        assert!(BlochPoint::new(f64::INFINITY).is_err());
    }

    #[test]
    fn phase_normalization() {
        assert_eq!(normalize_phase(PI), PI);
        assert_eq!(normalize_phase(-PI), PI);
        assert_eq!(normalize_phase(-0.25 * PI), -0.25 * PI);
        assert_relative_eq!(normalize_phase(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(normalize_phase(-5.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn grid_includes_both_ends() {
        let g = kd_grid(5).unwrap();
        assert_eq!(g.first().unwrap().kd(), -PI);
        assert_eq!(g.last().unwrap().kd(), PI);
        assert_eq!(g[2].kd(), 0.0);
        assert!(kd_grid(1).is_err());
    }
}
