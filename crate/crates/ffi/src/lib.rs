//! C ABI over the `hetcdc` library.
//!
//! Instances and placements are opaque handles created by `*_new` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`HetcdcStatus`]; on failure the message is kept per thread and can be read
//! with [`hetcdc_last_error`]. Loads cross the boundary as exact
//! [`HetcdcRational`] values.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hetcdc::coding_k3::{achievable_load, plan_shuffle};
use hetcdc::converse_bounds::lower_bound;
use hetcdc::lp_general::{build_model, solve, LpStatus};
use hetcdc::oracle::min_load_bruteforce;
use hetcdc::placement_k3::{build_placement, classify_regime, optimal_load, Placement};
use hetcdc::shuffle_sim::{run_round, SimConfig};
use hetcdc::{Error, Load, SystemConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HetcdcStatus {
    Ok = 0,
    NullPointer = 1,
    FeasibilityViolation = 2,
    BadDimension = 3,
    InvalidAllocation = 4,
    InternalContradiction = 5,
    Undecodable = 6,
    ReduceFailure = 7,
    BudgetExceeded = 8,
    TooLarge = 9,
    Unbounded = 10,
    Parse = 11,
    Infeasible = 12,
    Panic = 13,
}

impl From<&Error> for HetcdcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::FeasibilityViolation { .. } => HetcdcStatus::FeasibilityViolation,
            Error::BadDimension(_) => HetcdcStatus::BadDimension,
            Error::InvalidAllocation(_) => HetcdcStatus::InvalidAllocation,
            Error::InternalContradiction(_) => HetcdcStatus::InternalContradiction,
            Error::Undecodable { .. } => HetcdcStatus::Undecodable,
            Error::ReduceFailure { .. } => HetcdcStatus::ReduceFailure,
            Error::BudgetExceeded { .. } => HetcdcStatus::BudgetExceeded,
            Error::TooLarge { .. } => HetcdcStatus::TooLarge,
            Error::Unbounded => HetcdcStatus::Unbounded,
            Error::Parse(_) => HetcdcStatus::Parse,
        }
    }
}

/// Exact `num/den` with `den > 0`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HetcdcRational {
    pub num: i64,
    pub den: i64,
}

impl From<Load> for HetcdcRational {
    fn from(l: Load) -> Self {
        HetcdcRational {
            num: l.numer(),
            den: l.denom(),
        }
    }
}

/// Instance-level lower bounds for three nodes.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HetcdcBounds {
    pub pooled: HetcdcRational,
    pub cutset: HetcdcRational,
    pub genie: HetcdcRational,
    pub max_bound: HetcdcRational,
}

/// Opaque validated instance.
pub struct HetcdcConfig(SystemConfig);

/// Opaque optimal three-node placement.
pub struct HetcdcPlacement(Placement);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (HetcdcStatus, String)>) -> HetcdcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HetcdcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside hetcdc".into());
            HetcdcStatus::Panic
        }
    }
}

fn domain(e: Error) -> (HetcdcStatus, String) {
    ((&e).into(), format!("{}: {e}", e.name()))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (HetcdcStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (HetcdcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), (HetcdcStatus, String)> {
    if out.is_null() {
        return Err((HetcdcStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hetcdc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code, or null for an unknown code.
#[no_mangle]
pub extern "C" fn hetcdc_status_name(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"Ok",
        1 => c"NullPointer",
        2 => c"FeasibilityViolation",
        3 => c"BadDimension",
        4 => c"InvalidAllocation",
        5 => c"InternalContradiction",
        6 => c"Undecodable",
        7 => c"ReduceFailure",
        8 => c"BudgetExceeded",
        9 => c"TooLarge",
        10 => c"Unbounded",
        11 => c"Parse",
        12 => c"Infeasible",
        13 => c"Panic",
        _ => return ptr::null(),
    };
    s.as_ptr()
}

/// Creates an instance from `k` storage sizes and `n` files.
///
/// # Safety
/// `storage` must point to `k` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_config_new(
    storage: *const u64,
    k: usize,
    n: u64,
    out: *mut *mut HetcdcConfig,
) -> HetcdcStatus {
    guard(|| {
        if storage.is_null() && k > 0 {
            return Err((HetcdcStatus::NullPointer, "storage is null".into()));
        }
        let m = if k == 0 { Vec::new() } else { std::slice::from_raw_parts(storage, k).to_vec() };
        let cfg = SystemConfig::new(m, n).map_err(domain)?;
        write_out(out, Box::into_raw(Box::new(HetcdcConfig(cfg))))
    })
}

/// # Safety
/// `cfg` must come from [`hetcdc_config_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_config_free(cfg: *mut HetcdcConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Closed-form minimum load for three nodes.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_optimal_load(cfg: *const HetcdcConfig, out: *mut HetcdcRational) -> HetcdcStatus {
    guard(|| {
        let c = deref(cfg, "config")?;
        write_out(out, optimal_load(&c.0).map_err(domain)?.into())
    })
}

/// Regime number 1..=7.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_classify_regime(cfg: *const HetcdcConfig, out: *mut u32) -> HetcdcStatus {
    guard(|| {
        let c = deref(cfg, "config")?;
        let r = classify_regime(&c.0).map_err(domain)?;
        write_out(out, r as u32 + 1)
    })
}

/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_lower_bounds(cfg: *const HetcdcConfig, out: *mut HetcdcBounds) -> HetcdcStatus {
    guard(|| {
        let c = deref(cfg, "config")?;
        let r = lower_bound(&c.0).map_err(domain)?;
        write_out(
            out,
            HetcdcBounds {
                pooled: r.pooled.into(),
                cutset: r.cutset.into(),
                genie: r.genie.into(),
                max_bound: r.max_bound.into(),
            },
        )
    })
}

/// Brute-force minimum at half-file granularity.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_oracle_min(
    cfg: *const HetcdcConfig,
    budget: u64,
    out: *mut HetcdcRational,
) -> HetcdcStatus {
    guard(|| {
        let c = deref(cfg, "config")?;
        let r = min_load_bruteforce(&c.0, budget as u128).map_err(domain)?;
        write_out(out, r.min.into())
    })
}

/// Optimum of the general-K linear program.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_lp_optimum(cfg: *const HetcdcConfig, out: *mut HetcdcRational) -> HetcdcStatus {
    guard(|| {
        let c = deref(cfg, "config")?;
        let sol = solve(&build_model(&c.0).map_err(domain)?).map_err(domain)?;
        match (sol.status, sol.optimum) {
            (LpStatus::Optimal, Some(v)) => write_out(out, v.into()),
            _ => Err((HetcdcStatus::Infeasible, "linear program is infeasible".into())),
        }
    })
}

/// Builds the optimal placement of a three-node instance.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_placement_new(
    cfg: *const HetcdcConfig,
    out: *mut *mut HetcdcPlacement,
) -> HetcdcStatus {
    guard(|| {
        let c = deref(cfg, "config")?;
        let p = build_placement(&c.0).map_err(domain)?;
        write_out(out, Box::into_raw(Box::new(HetcdcPlacement(p))))
    })
}

/// # Safety
/// `p` must come from [`hetcdc_placement_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_placement_free(p: *mut HetcdcPlacement) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Subpacketization factor: 1, or 2 when files are split in halves.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_placement_scale(p: *const HetcdcPlacement) -> u64 {
    p.as_ref().map_or(0, |p| p.0.scale)
}

/// Grouped XOR load of the placement in units of the original instance.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_placement_load(p: *const HetcdcPlacement, out: *mut HetcdcRational) -> HetcdcStatus {
    guard(|| {
        let p = deref(p, "placement")?;
        let l = achievable_load(&p.0.allocation).map_err(domain)?;
        write_out(out, l.unscale(p.0.scale).into())
    })
}

/// Placement as a JSON document. Release the string with
/// [`hetcdc_string_free`].
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_placement_json(p: *const HetcdcPlacement, out: *mut *mut c_char) -> HetcdcStatus {
    guard(|| {
        let p = deref(p, "placement")?;
        let load = achievable_load(&p.0.allocation).map_err(domain)?;
        let doc = p.0.allocation.to_doc(Some(p.0.regime.to_string()), load, p.0.scale);
        let s = CString::new(doc.to_json()).expect("json has no nul");
        write_out(out, s.into_raw())
    })
}

/// Runs a byte-level round on the placement and reports the measured load
/// in units of the original instance.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_simulate(
    p: *const HetcdcPlacement,
    t_bytes: usize,
    seed: u64,
    out: *mut HetcdcRational,
) -> HetcdcStatus {
    guard(|| {
        let p = deref(p, "placement")?;
        let alloc = &p.0.allocation;
        let plan = plan_shuffle(alloc).map_err(domain)?;
        let sim = SimConfig::new(alloc.config().clone(), t_bytes, seed).map_err(domain)?;
        let report = run_round(&sim, alloc, &plan).map_err(domain)?;
        write_out(out, report.measured_load.unscale(p.0.scale).into())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hetcdc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
