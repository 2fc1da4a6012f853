//! Command dispatch: one table per command.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use super::config::{ConfigError, RunConfig};
use super::output::OutputTable;
use crate::bands::{band_scan, gap_extrema, ExtremumKind};
use crate::meanfield::solve_meanfield;
use crate::model::{kd_grid, BlochPoint, LatticeParams};
use crate::oracle::{integrate_interaction_picture, lattice_bloch_deviation};
use crate::quench::{quench_scan, quench_trace, schedule_for, thermal_populations, ThermalPopulations};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bands,
    Weights,
    Gap,
    Meanfield,
    Thermal,
    QuenchTrace,
    QuenchScan,
    Verify,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Bands,
        Command::Weights,
        Command::Gap,
        Command::Meanfield,
        Command::Thermal,
        Command::QuenchTrace,
        Command::QuenchScan,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::Weights => "weights",
            Command::Gap => "gap",
            Command::Meanfield => "meanfield",
            Command::Thermal => "thermal",
            Command::QuenchTrace => "quench-trace",
            Command::QuenchScan => "quench-scan",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(Error::NonConvergence { .. }) => 3,
            CliError::Compute(Error::DegenerateBasis { .. }) => 4,
            CliError::Compute(_) => 2,
            CliError::Io(_) => 5,
            CliError::VerifyFailed(_) => 1,
        }
    }
}

pub const MAGNUS_RK4_TOLERANCE: f64 = 1e-6;
pub const LATTICE_BLOCH_TOLERANCE: f64 = 1e-10;
/// Grid used by the Magnus-versus-RK4 check.
pub const VERIFY_KD_POINTS: usize = 64;
pub const VERIFY_RING_SIZES: [usize; 4] = [2, 4, 8, 16];

fn over_pi(x: f64) -> f64 {
    x / PI
}

fn table(cfg: &RunConfig, cmd: Command, columns: &[&'static str]) -> OutputTable {
    OutputTable::new(cmd.name(), columns, cfg.metadata())
}

fn thermal_or_nan(alpha_a: f64, p: &LatticeParams) -> crate::Result<ThermalPopulations> {
    if alpha_a.is_nan() {
        Ok(ThermalPopulations {
            n_a: f64::NAN,
            n_b: f64::NAN,
        })
    } else {
        thermal_populations(alpha_a, p)
    }
}

/// Outcome of the two oracle comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifySummary {
    pub magnus_rk4_deviation: f64,
    pub rk4_unitarity_defect: f64,
    pub lattice_bloch_deviation: f64,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.magnus_rk4_deviation <= MAGNUS_RK4_TOLERANCE && self.lattice_bloch_deviation <= LATTICE_BLOCH_TOLERANCE
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "magnus_rk4 deviation {:.3e} (tolerance {:.0e}); lattice_bloch deviation {:.3e} (tolerance {:.0e}): {}",
            self.magnus_rk4_deviation,
            MAGNUS_RK4_TOLERANCE,
            self.lattice_bloch_deviation,
            LATTICE_BLOCH_TOLERANCE,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Runs both oracles against the configured parameters.
///
/// Magnus against RK4 covers every configured phase on a 64-point grid;
/// the ring check covers N ∈ {2, 4, 8, 16} with windings {0, 1, N/2}.
pub fn verify(cfg: &RunConfig) -> crate::Result<VerifySummary> {
    let rule = cfg.quench_time();
    let grid = kd_grid(VERIFY_KD_POINTS)?;
    let mut magnus = 0.0f64;
    let mut unitarity = 0.0f64;
    for theta in cfg.phase_list() {
        let p = cfg.lattice.with_phase(theta);
        let reports: Vec<_> = grid
            .par_iter()
            .map(|k| {
                let s = schedule_for(&p, k.kd(), rule)?;
                integrate_interaction_picture(&p, *k, &s, cfg.n_steps)
            })
            .collect::<crate::Result<_>>()?;
        for r in reports {
            magnus = magnus.max(r.magnus_deviation);
            unitarity = unitarity.max(r.unitarity_defect);
        }
    }
    let mut lattice = 0.0f64;
    for n in VERIFY_RING_SIZES {
        let mut windings = vec![0, 1, (n / 2) as i64];
        windings.dedup();
        for m in windings {
            lattice = lattice.max(lattice_bloch_deviation(&cfg.lattice, n, m)?);
        }
    }
    Ok(VerifySummary {
        magnus_rk4_deviation: magnus,
        rk4_unitarity_defect: unitarity,
        lattice_bloch_deviation: lattice,
    })
}

/// Computes the table for `cmd`. The config must already be validated.
pub fn run_command(cfg: &RunConfig, cmd: Command) -> crate::Result<OutputTable> {
    let p = cfg.lattice;
    match cmd {
        Command::Bands => {
            let mut t = table(
                cfg,
                cmd,
                &[
                    "kd_over_pi",
                    "omega_plus",
                    "omega_minus",
                    "gap",
                    "alpha_A",
                    "beta_A",
                    "alpha_B",
                    "beta_B",
                ],
            );
            for r in band_scan(&p, cfg.n_k)? {
                t.push(vec![
                    over_pi(r.kd),
                    r.omega_plus,
                    r.omega_minus,
                    r.gap,
                    r.alpha_a,
                    r.beta_a,
                    r.alpha_b,
                    r.beta_b,
                ]);
            }
            Ok(t)
        }
        Command::Weights => {
            let mut t = table(cfg, cmd, &["kd_over_pi", "alpha_A", "beta_A", "alpha_B", "beta_B"]);
            for r in band_scan(&p, cfg.n_k)? {
                t.push(vec![over_pi(r.kd), r.alpha_a, r.beta_a, r.alpha_b, r.beta_b]);
            }
            Ok(t)
        }
        Command::Gap => {
            // extremum: -1 minimum, +1 maximum, 0 flat band
            let mut t = table(cfg, cmd, &["theta_over_pi", "kd_over_pi", "gap", "extremum"]);
            for theta in cfg.phase_list() {
                let pt = p.with_phase(theta);
                for e in gap_extrema(&pt, cfg.n_k_coarse, cfg.refine_tol)? {
                    let kind = match e.kind {
                        ExtremumKind::Minimum => -1.0,
                        ExtremumKind::Maximum => 1.0,
                        ExtremumKind::Flat => 0.0,
                    };
                    t.push(vec![over_pi(pt.phase), over_pi(e.kd), e.gap, kind]);
                }
            }
            Ok(t)
        }
        Command::Meanfield => {
            let mut t = table(
                cfg,
                cmd,
                &[
                    "alpha_re",
                    "alpha_im",
                    "beta_re",
                    "beta_im",
                    "g_enhanced",
                    "residual",
                    "iterations",
                ],
            );
            let s = solve_meanfield(&cfg.drive(), cfg.tol, cfg.max_iter, cfg.damping)?;
            t.push(vec![
                s.alpha.re,
                s.alpha.im,
                s.beta.re,
                s.beta.im,
                s.g_enhanced,
                s.residual,
                s.iterations as f64,
            ]);
            Ok(t)
        }
        Command::Thermal => {
            let mut t = table(cfg, cmd, &["kd_over_pi", "alpha_A", "N_th_A", "N_th_B"]);
            for r in band_scan(&p, cfg.n_k)? {
                let th = thermal_or_nan(r.alpha_a, &p)?;
                t.push(vec![over_pi(r.kd), r.alpha_a, th.n_a, th.n_b]);
            }
            Ok(t)
        }
        Command::QuenchTrace => {
            let mut t = table(cfg, cmd, &["t_over_tq", "N_A", "N_B", "Nq_A", "Nq_B"]);
            let k = BlochPoint::new(cfg.kd)?;
            let s = schedule_for(&p, k.kd(), cfg.quench_time())?;
            for r in quench_trace(&p, k, &s, cfg.n_t)? {
                t.push(vec![r.t / r.t_q, r.n_a, r.n_b, r.nq_a, r.nq_b]);
            }
            Ok(t)
        }
        Command::QuenchScan => {
            let mut t = table(
                cfg,
                cmd,
                &["theta_over_pi", "kd_over_pi", "t_q", "N_A", "N_B", "Nq_A", "Nq_B"],
            );
            for theta in cfg.phase_list() {
                let pt = p.with_phase(theta);
                for r in quench_scan(&pt, cfg.quench_time(), cfg.n_k)? {
                    t.push(vec![
                        over_pi(pt.phase),
                        over_pi(r.kd),
                        r.t_q,
                        r.n_a,
                        r.n_b,
                        r.nq_a,
                        r.nq_b,
                    ]);
                }
            }
            Ok(t)
        }
        Command::Verify => {
            let mut t = table(
                cfg,
                cmd,
                &[
                    "magnus_rk4_deviation",
                    "magnus_rk4_tolerance",
                    "rk4_unitarity_defect",
                    "lattice_bloch_deviation",
                    "lattice_bloch_tolerance",
                    "passed",
                ],
            );
            let v = verify(cfg)?;
            t.push(vec![
                v.magnus_rk4_deviation,
                MAGNUS_RK4_TOLERANCE,
                v.rk4_unitarity_defect,
                v.lattice_bloch_deviation,
                LATTICE_BLOCH_TOLERANCE,
                if v.passed() { 1.0 } else { 0.0 },
            ]);
            Ok(t)
        }
    }
}
