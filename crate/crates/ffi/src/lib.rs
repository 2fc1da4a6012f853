//! C interface to `omband`.
//!
//! Every function returns an `int32_t` status (`OMBAND_OK` on success) and
//! writes results through out-pointers. Table-producing functions take a
//! caller-owned buffer and its capacity; on `OMBAND_ERR_BUFFER_TOO_SMALL`
//! the required length is still stored in `*out_len`. The text of the most
//! recent failure on the calling thread is available from
//! `omband_last_error`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use omband::bands::{self, ExtremumKind};
use omband::linalg::Propagator2;
use omband::meanfield::{solve_meanfield, DriveParams};
use omband::model::{BlochPoint, LatticeParams};
use omband::quench::{self, QuenchTime};
use omband::Error;

pub const OMBAND_OK: i32 = 0;
pub const OMBAND_ERR_INVALID: i32 = 2;
pub const OMBAND_ERR_NONCONVERGENCE: i32 = 3;
pub const OMBAND_ERR_DEGENERATE: i32 = 4;
pub const OMBAND_ERR_NULL: i32 = 10;
pub const OMBAND_ERR_BUFFER_TOO_SMALL: i32 = 11;
pub const OMBAND_ERR_PANIC: i32 = 12;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } => OMBAND_ERR_NONCONVERGENCE,
            Error::DegenerateBasis { .. } => OMBAND_ERR_DEGENERATE,
            _ => OMBAND_ERR_INVALID,
        };
        Failure(code, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(OMBAND_ERR_NULL, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            OMBAND_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_last_error(&msg);
            code
        }
        Err(_) => {
            set_last_error("internal panic");
            OMBAND_ERR_PANIC
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

/// Copies `items` into a caller buffer of capacity `cap`.
unsafe fn fill<T: Copy>(items: &[T], buf: *mut T, cap: usize, out_len: *mut usize) -> Result<(), Failure> {
    let len = out(out_len, "out_len")?;
    *len = items.len();
    if cap < items.len() {
        return Err(Failure(
            OMBAND_ERR_BUFFER_TOO_SMALL,
            format!("buffer holds {cap} rows, {} needed", items.len()),
        ));
    }
    if !items.is_empty() {
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(items.as_ptr(), buf, items.len());
    }
    Ok(())
}

/// Opaque parameter set.
pub struct OmbandParams {
    inner: LatticeParams,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmbandLattice {
    pub omega_m: f64,
    pub detuning: f64,
    pub j_hop: f64,
    pub k_hop: f64,
    pub coupling: f64,
    pub phase: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub n_th: f64,
}

impl From<LatticeParams> for OmbandLattice {
    fn from(p: LatticeParams) -> Self {
        Self {
            omega_m: p.omega_m,
            detuning: p.detuning,
            j_hop: p.j_hop,
            k_hop: p.k_hop,
            coupling: p.coupling,
            phase: p.phase,
            kappa: p.kappa,
            gamma: p.gamma,
            n_th: p.n_th,
        }
    }
}

impl From<OmbandLattice> for LatticeParams {
    fn from(p: OmbandLattice) -> Self {
        Self {
            omega_m: p.omega_m,
            detuning: p.detuning,
            j_hop: p.j_hop,
            k_hop: p.k_hop,
            coupling: p.coupling,
            phase: p.phase,
            kappa: p.kappa,
            gamma: p.gamma,
            n_th: p.n_th,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OmbandComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OmbandHybridBasis {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub u_a: f64,
    pub v_a: f64,
    pub u_b: f64,
    pub v_b: f64,
    pub alpha_a: f64,
    pub beta_a: f64,
    pub alpha_b: f64,
    pub beta_b: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OmbandBandRow {
    pub kd: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub gap: f64,
    pub alpha_a: f64,
    pub beta_a: f64,
    pub alpha_b: f64,
    pub beta_b: f64,
}

/// `kind`: -1 minimum, +1 maximum, 0 flat band.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OmbandGapExtremum {
    pub kd: f64,
    pub gap: f64,
    pub kind: i32,
}

/// Row-major 2×2 complex matrix.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OmbandPropagator {
    pub m: [OmbandComplex; 4],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OmbandQuenchRecord {
    pub kd: f64,
    pub t: f64,
    pub t_q: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub nq_a: f64,
    pub nq_b: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmbandTqRule {
    /// t_q = value / gap(kd)
    PerK = 0,
    /// t_q = value / min gap
    GlobalMinGap = 1,
    /// t_q = value
    Fixed = 2,
}

fn tq_rule(rule: i32, value: f64) -> Result<QuenchTime, Failure> {
    match rule {
        r if r == OmbandTqRule::PerK as i32 => Ok(QuenchTime::PerPoint { factor: value }),
        r if r == OmbandTqRule::GlobalMinGap as i32 => Ok(QuenchTime::GlobalMinGap { factor: value }),
        r if r == OmbandTqRule::Fixed as i32 => Ok(QuenchTime::Fixed(value)),
        r => Err(Failure(OMBAND_ERR_INVALID, format!("unknown t_q rule {r}"))),
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmbandDrive {
    pub rabi: f64,
    pub g_vacuum: f64,
    pub gamma_m: f64,
    pub detuning: f64,
    pub j_hop: f64,
    pub k_hop: f64,
    pub omega_m: f64,
    pub kappa: f64,
    pub phase: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OmbandMeanField {
    pub alpha: OmbandComplex,
    pub beta: OmbandComplex,
    pub g_enhanced: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn complex(z: num_complex::Complex64) -> OmbandComplex {
    OmbandComplex { re: z.re, im: z.im }
}

fn propagator(p: &Propagator2) -> OmbandPropagator {
    OmbandPropagator {
        m: [
            complex(p.0[0][0]),
            complex(p.0[0][1]),
            complex(p.0[1][0]),
            complex(p.0[1][1]),
        ],
    }
}

fn record(r: &quench::QuenchRecord) -> OmbandQuenchRecord {
    OmbandQuenchRecord {
        kd: r.kd,
        t: r.t,
        t_q: r.t_q,
        n_a: r.n_a,
        n_b: r.n_b,
        nq_a: r.nq_a,
        nq_b: r.nq_b,
    }
}

unsafe fn params<'a>(h: *const OmbandParams) -> Result<&'a LatticeParams, Failure> {
    h.as_ref().map(|p| &p.inner).ok_or_else(|| null("params"))
}

/// NUL-terminated version string with static lifetime.
#[no_mangle]
pub extern "C" fn omband_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length excluding the NUL.
#[no_mangle]
pub unsafe extern "C" fn omband_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Validates `lattice` and stores a new handle in `*out_params`.
#[no_mangle]
pub unsafe extern "C" fn omband_params_new(lattice: *const OmbandLattice, out_params: *mut *mut OmbandParams) -> i32 {
    guard(|| {
        let l = *lattice.as_ref().ok_or_else(|| null("lattice"))?;
        let slot = out(out_params, "out_params")?;
        let inner = LatticeParams::from(l).validated()?;
        *slot = Box::into_raw(Box::new(OmbandParams { inner }));
        Ok(())
    })
}

/// Preset with hopping stronger than the coupling. Never null.
#[no_mangle]
pub extern "C" fn omband_params_strong_hopping() -> *mut OmbandParams {
    Box::into_raw(Box::new(OmbandParams {
        inner: LatticeParams::strong_hopping(),
    }))
}

/// Preset with hopping weaker than the coupling. Never null.
#[no_mangle]
pub extern "C" fn omband_params_weak_hopping() -> *mut OmbandParams {
    Box::into_raw(Box::new(OmbandParams {
        inner: LatticeParams::weak_hopping(),
    }))
}

/// Releases a handle; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn omband_params_free(params: *mut OmbandParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

#[no_mangle]
pub unsafe extern "C" fn omband_params_get(params: *const OmbandParams, out_lattice: *mut OmbandLattice) -> i32 {
    guard(|| {
        *out(out_lattice, "out_lattice")? = (*self::params(params)?).into();
        Ok(())
    })
}

/// Sets θ, reduced to (−π, π].
#[no_mangle]
pub unsafe extern "C" fn omband_params_set_phase(params: *mut OmbandParams, theta: f64) -> i32 {
    guard(|| {
        let h = out(params, "params")?;
        if !theta.is_finite() {
            return Err(Failure(
                OMBAND_ERR_INVALID,
                format!("theta must be finite, got {theta}"),
            ));
        }
        h.inner = h.inner.with_phase(theta);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn omband_params_set_coupling(params: *mut OmbandParams, g: f64) -> i32 {
    guard(|| {
        let h = out(params, "params")?;
        h.inner = h.inner.with_coupling(g).validated()?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn omband_band_energies(
    params: *const OmbandParams,
    kd: f64,
    out_plus: *mut f64,
    out_minus: *mut f64,
) -> i32 {
    guard(|| {
        let (p, m) = bands::band_energies(self::params(params)?, BlochPoint::new(kd)?)?;
        *out(out_plus, "out_plus")? = p;
        *out(out_minus, "out_minus")? = m;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn omband_hybrid_basis(
    params: *const OmbandParams,
    kd: f64,
    out_basis: *mut OmbandHybridBasis,
) -> i32 {
    guard(|| {
        let b = bands::hybrid_basis(self::params(params)?, BlochPoint::new(kd)?)?;
        *out(out_basis, "out_basis")? = OmbandHybridBasis {
            omega_plus: b.omega_plus,
            omega_minus: b.omega_minus,
            u_a: b.u_a,
            v_a: b.v_a,
            u_b: b.u_b,
            v_b: b.v_b,
            alpha_a: b.alpha_a,
            beta_a: b.beta_a,
            alpha_b: b.alpha_b,
            beta_b: b.beta_b,
        };
        Ok(())
    })
}

/// `n_k` rows over [−π, π].
#[no_mangle]
pub unsafe extern "C" fn omband_band_scan(
    params: *const OmbandParams,
    n_k: usize,
    buf: *mut OmbandBandRow,
    cap: usize,
    out_len: *mut usize,
) -> i32 {
    guard(|| {
        let rows: Vec<OmbandBandRow> = bands::band_scan(self::params(params)?, n_k)?
            .into_iter()
            .map(|r| OmbandBandRow {
                kd: r.kd,
                omega_plus: r.omega_plus,
                omega_minus: r.omega_minus,
                gap: r.gap,
                alpha_a: r.alpha_a,
                beta_a: r.beta_a,
                alpha_b: r.alpha_b,
                beta_b: r.beta_b,
            })
            .collect();
        fill(&rows, buf, cap, out_len)
    })
}

#[no_mangle]
pub unsafe extern "C" fn omband_gap_extrema(
    params: *const OmbandParams,
    n_coarse: usize,
    refine_tol: f64,
    buf: *mut OmbandGapExtremum,
    cap: usize,
    out_len: *mut usize,
) -> i32 {
    guard(|| {
        let rows: Vec<OmbandGapExtremum> = bands::gap_extrema(self::params(params)?, n_coarse, refine_tol)?
            .into_iter()
            .map(|e| OmbandGapExtremum {
                kd: e.kd,
                gap: e.gap,
                kind: match e.kind {
                    ExtremumKind::Minimum => -1,
                    ExtremumKind::Maximum => 1,
                    ExtremumKind::Flat => 0,
                },
            })
            .collect();
        fill(&rows, buf, cap, out_len)
    })
}

/// Thermal occupations of A and B for photon weight `alpha_a`.
#[no_mangle]
pub unsafe extern "C" fn omband_thermal(
    params: *const OmbandParams,
    alpha_a: f64,
    out_n_a: *mut f64,
    out_n_b: *mut f64,
) -> i32 {
    guard(|| {
        let th = quench::thermal_populations(alpha_a, self::params(params)?)?;
        *out(out_n_a, "out_n_a")? = th.n_a;
        *out(out_n_b, "out_n_b")? = th.n_b;
        Ok(())
    })
}

/// Magnus propagator of the ramp g0(1 − 2t/t_q) at half-detuning `delta_half`.
#[no_mangle]
pub unsafe extern "C" fn omband_magnus_propagator(
    g0: f64,
    delta_half: f64,
    t_q: f64,
    t: f64,
    out_prop: *mut OmbandPropagator,
) -> i32 {
    guard(|| {
        for (name, v) in [("g0", g0), ("delta_half", delta_half), ("t_q", t_q), ("t", t)] {
            if !v.is_finite() {
                return Err(Failure(OMBAND_ERR_INVALID, format!("`{name}` must be finite")));
            }
        }
        quench::QuenchSchedule::new(g0, t_q)?;
        let slot = out(out_prop, "out_prop")?;
        *slot = propagator(&quench::magnus_propagator(g0, delta_half, t_q, t));
        Ok(())
    })
}

/// `n_t` instants of [0, t_q] at `kd`; `rule` is an `OmbandTqRule` and
/// `value` its factor or fixed time.
#[no_mangle]
pub unsafe extern "C" fn omband_quench_trace(
    params: *const OmbandParams,
    kd: f64,
    rule: i32,
    value: f64,
    n_t: usize,
    buf: *mut OmbandQuenchRecord,
    cap: usize,
    out_len: *mut usize,
) -> i32 {
    guard(|| {
        let p = self::params(params)?;
        let k = BlochPoint::new(kd)?;
        let s = quench::schedule_for(p, k.kd(), tq_rule(rule, value)?)?;
        let rows: Vec<_> = quench::quench_trace(p, k, &s, n_t)?.iter().map(record).collect();
        fill(&rows, buf, cap, out_len)
    })
}

/// End-of-quench populations on `n_k` points over [−π, π]; `rule` and
/// `value` as for `omband_quench_trace`.
#[no_mangle]
pub unsafe extern "C" fn omband_quench_scan(
    params: *const OmbandParams,
    rule: i32,
    value: f64,
    n_k: usize,
    buf: *mut OmbandQuenchRecord,
    cap: usize,
    out_len: *mut usize,
) -> i32 {
    guard(|| {
        let rows: Vec<_> = quench::quench_scan(self::params(params)?, tq_rule(rule, value)?, n_k)?
            .iter()
            .map(record)
            .collect();
        fill(&rows, buf, cap, out_len)
    })
}

#[no_mangle]
pub unsafe extern "C" fn omband_meanfield(
    drive: *const OmbandDrive,
    tol: f64,
    max_iter: usize,
    damping: f64,
    out_solution: *mut OmbandMeanField,
) -> i32 {
    guard(|| {
        let d = *drive.as_ref().ok_or_else(|| null("drive"))?;
        let slot = out(out_solution, "out_solution")?;
        let core = DriveParams {
            rabi: d.rabi,
            g_vacuum: d.g_vacuum,
            gamma_m: d.gamma_m,
            detuning: d.detuning,
            j_hop: d.j_hop,
            k_hop: d.k_hop,
            omega_m: d.omega_m,
            kappa: d.kappa,
            phase: d.phase,
        };
        let s = solve_meanfield(&core, tol, max_iter, damping)?;
        *slot = OmbandMeanField {
            alpha: complex(s.alpha),
            beta: complex(s.beta),
            g_enhanced: s.g_enhanced,
            residual: s.residual,
            iterations: s.iterations,
        };
        Ok(())
    })
}
