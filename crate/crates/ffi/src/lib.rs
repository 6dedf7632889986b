//! C ABI for `refpref`.
//!
//! Groups and economies are opaque handles created by `*_new` and released
//! by `*_free`. Every fallible call returns an `RpStatus`; on failure the
//! thread's last error message is available from `rp_last_error`.
//!
//! Array arguments are not length-checked by the ABI. For a group over `l`
//! commodities, bundles, prices and references hold `l` doubles, group
//! parameters hold `l - 1`, and exponent matrices are `l × (l - 1)` in
//! row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use refpref::economy::{excess_demand_with, DemandMethod};
use refpref::{
    decompose, demand_closed_form, demand_direct, find_min_matrix, satisfaction, tatonnement, value, Agent, Bundle,
    DemandResult, Error, GroupSpec, Income, TatonnementConfig,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    NullPointer = 1,
    BadShape = 2,
    NonFinite = 3,
    /// The exponent matrix does not give unique decompositions.
    SingularGroup = 4,
    /// A bundle, price or reference has a non-positive coordinate.
    NonPositive = 5,
    /// No minimizing matrix exists.
    NotCoercive = 6,
    NotConverged = 7,
    InvalidParameter = 8,
    /// A Rust panic was caught at the boundary.
    Internal = 99,
}

/// A validated exponent group.
pub struct RpGroup {
    spec: Arc<GroupSpec>,
}

/// A list of agents over a fixed number of commodities.
pub struct RpEconomy {
    commodities: usize,
    agents: Vec<Agent>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> RpStatus {
    match err.root() {
        Error::BadShape(_) | Error::SpecMismatch { .. } => RpStatus::BadShape,
        Error::NonFinite(_) => RpStatus::NonFinite,
        Error::SingularSystem { .. } => RpStatus::SingularGroup,
        Error::NonPositiveBundle { .. }
        | Error::NegativeCoordinate { .. }
        | Error::NonPositivePrice { .. }
        | Error::BothBoundary
        | Error::ZeroWealth(_) => RpStatus::NonPositive,
        Error::NotCoercive => RpStatus::NotCoercive,
        Error::NotConverged { .. } => RpStatus::NotConverged,
        _ => RpStatus::InvalidParameter,
    }
}

struct Failure(RpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RpStatus::NullPointer, format!("null pointer: {what}"))
}

/// Runs `f`, records any error message and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            RpStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            RpStatus::Internal
        }
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_mut<'a>(p: *mut f64, n: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

unsafe fn bundle(p: *const f64, n: usize, what: &str) -> Result<Bundle, Failure> {
    Ok(Bundle::new(slice(p, n, what)?.to_vec())?)
}

unsafe fn group<'a>(g: *const RpGroup) -> Result<&'a RpGroup, Failure> {
    g.as_ref().ok_or_else(|| null("group"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Text for a status code. The string is static.
#[no_mangle]
pub extern "C" fn rp_status_message(status: RpStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        RpStatus::Ok => b"ok\0",
        RpStatus::NullPointer => b"null pointer argument\0",
        RpStatus::BadShape => b"dimension mismatch\0",
        RpStatus::NonFinite => b"non-finite input\0",
        RpStatus::SingularGroup => b"exponent matrix gives no unique decomposition\0",
        RpStatus::NonPositive => b"non-positive coordinate or wealth\0",
        RpStatus::NotCoercive => b"no minimizing matrix exists\0",
        RpStatus::NotConverged => b"solver did not converge\0",
        RpStatus::InvalidParameter => b"invalid parameter\0",
        RpStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a group over `commodities` goods from a row-major
/// `commodities × (commodities - 1)` exponent matrix.
///
/// # Safety
/// `exponents` must point to that many doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rp_group_new(commodities: usize, exponents: *const f64, out: *mut *mut RpGroup) -> RpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        if commodities < 2 {
            return Err(Failure(RpStatus::BadShape, "need at least two commodities".into()));
        }
        let d = commodities - 1;
        let flat = slice(exponents, commodities * d, "exponents")?;
        let rows: Vec<Vec<f64>> = flat.chunks(d).map(<[f64]>::to_vec).collect();
        let spec = GroupSpec::new(&rows)?;
        out.write(Box::into_raw(Box::new(RpGroup { spec: Arc::new(spec) })));
        Ok(())
    })
}

/// # Safety
/// `g` must come from `rp_group_new` and not be freed twice. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn rp_group_free(g: *mut RpGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of commodities, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn rp_group_commodities(g: *const RpGroup) -> usize {
    g.as_ref().map_or(0, |g| g.spec.commodities())
}

/// Whether the group has a minimizing matrix. False for a null handle.
///
/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn rp_group_is_coercive(g: *const RpGroup) -> bool {
    g.as_ref().is_some_and(|g| g.spec.is_coercive())
}

/// Decomposes `x = value · (M × r)`, writing `value` and the `l - 1`
/// parameters of `M`.
///
/// # Safety
/// See the module notes on array lengths.
#[no_mangle]
pub unsafe extern "C" fn rp_decompose(
    g: *const RpGroup,
    x: *const f64,
    r: *const f64,
    out_value: *mut f64,
    out_params: *mut f64,
) -> RpStatus {
    guard(|| {
        let g = group(g)?;
        let l = g.spec.commodities();
        let d = decompose(&g.spec, &bundle(x, l, "x")?, &bundle(r, l, "r")?)?;
        slice_mut(out_params, l - 1, "out_params")?.copy_from_slice(d.element.params());
        write(out_value, d.value, "out_value")
    })
}

/// Value of `x` against `r`.
///
/// # Safety
/// See the module notes on array lengths.
#[no_mangle]
pub unsafe extern "C" fn rp_value(g: *const RpGroup, x: *const f64, r: *const f64, out: *mut f64) -> RpStatus {
    guard(|| {
        let g = group(g)?;
        let l = g.spec.commodities();
        let v = value(&g.spec, &bundle(x, l, "x")?, &bundle(r, l, "r")?)?;
        write(out, v, "out")
    })
}

/// Minimizing matrix of the unweighted sum of exponentials: writes its
/// `l - 1` parameters and the minimum value.
///
/// # Safety
/// See the module notes on array lengths.
#[no_mangle]
pub unsafe extern "C" fn rp_min_matrix(g: *const RpGroup, out_params: *mut f64, out_min: *mut f64) -> RpStatus {
    guard(|| {
        let g = group(g)?;
        let m = find_min_matrix(&g.spec)?;
        slice_mut(out_params, g.spec.dim(), "out_params")?.copy_from_slice(m.element.params());
        write(out_min, m.g_min, "out_min")
    })
}

unsafe fn write_demand(
    d: &DemandResult,
    l: usize,
    out_bundle: *mut f64,
    out_value: *mut f64,
    out_params: *mut f64,
) -> Result<(), Failure> {
    slice_mut(out_bundle, l, "out_bundle")?.copy_from_slice(d.bundle.as_slice());
    if !out_params.is_null() {
        slice_mut(out_params, l - 1, "out_params")?.copy_from_slice(d.element.params());
    }
    if !out_value.is_null() {
        out_value.write(d.max_value);
    }
    Ok(())
}

/// Demand at prices `p` with wealth `wealth`, solved against reference `r`.
/// `out_value` and `out_params` may be null.
///
/// # Safety
/// See the module notes on array lengths.
#[no_mangle]
pub unsafe extern "C" fn rp_demand_direct(
    g: *const RpGroup,
    p: *const f64,
    wealth: f64,
    r: *const f64,
    out_bundle: *mut f64,
    out_value: *mut f64,
    out_params: *mut f64,
) -> RpStatus {
    guard(|| {
        let g = group(g)?;
        let l = g.spec.commodities();
        let d = demand_direct(
            &g.spec,
            &bundle(p, l, "p")?,
            &Income::Budget(wealth),
            &bundle(r, l, "r")?,
        )?;
        write_demand(&d, l, out_bundle, out_value, out_params)
    })
}

/// Reference-free demand. The value and parameters written are those
/// against the all-ones bundle. `out_value` and `out_params` may be null.
///
/// # Safety
/// See the module notes on array lengths.
#[no_mangle]
pub unsafe extern "C" fn rp_demand_closed_form(
    g: *const RpGroup,
    p: *const f64,
    wealth: f64,
    out_bundle: *mut f64,
    out_value: *mut f64,
    out_params: *mut f64,
) -> RpStatus {
    guard(|| {
        let g = group(g)?;
        let l = g.spec.commodities();
        let d = demand_closed_form(&g.spec, &bundle(p, l, "p")?, &Income::Budget(wealth))?;
        write_demand(&d, l, out_bundle, out_value, out_params)
    })
}

/// Maximal attainable value against `r` at prices `p` and wealth `wealth`.
///
/// # Safety
/// See the module notes on array lengths.
#[no_mangle]
pub unsafe extern "C" fn rp_satisfaction(
    g: *const RpGroup,
    p: *const f64,
    wealth: f64,
    r: *const f64,
    out: *mut f64,
) -> RpStatus {
    guard(|| {
        let g = group(g)?;
        let l = g.spec.commodities();
        let s = satisfaction(
            &g.spec,
            &bundle(p, l, "p")?,
            &Income::Budget(wealth),
            &bundle(r, l, "r")?,
        )?;
        write(out, s, "out")
    })
}

/// An empty economy over `commodities` goods.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rp_economy_new(commodities: usize, out: *mut *mut RpEconomy) -> RpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        if commodities < 2 {
            return Err(Failure(RpStatus::BadShape, "need at least two commodities".into()));
        }
        out.write(Box::into_raw(Box::new(RpEconomy {
            commodities,
            agents: Vec::new(),
        })));
        Ok(())
    })
}

/// # Safety
/// `e` must come from `rp_economy_new` and not be freed twice. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn rp_economy_free(e: *mut RpEconomy) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Adds an agent with group `g`, reference `r` and endowment `endowment`.
/// The economy keeps its own reference to the group, so `g` may be freed
/// afterwards.
///
/// # Safety
/// See the module notes on array lengths.
#[no_mangle]
pub unsafe extern "C" fn rp_economy_add_agent(
    e: *mut RpEconomy,
    g: *const RpGroup,
    r: *const f64,
    endowment: *const f64,
) -> RpStatus {
    guard(|| {
        let e = e.as_mut().ok_or_else(|| null("economy"))?;
        let g = group(g)?;
        let l = g.spec.commodities();
        if l != e.commodities {
            return Err(Failure(
                RpStatus::BadShape,
                format!("group has {l} commodities, economy has {}", e.commodities),
            ));
        }
        let agent = Agent::new(
            g.spec.clone(),
            bundle(r, l, "r")?,
            slice(endowment, l, "endowment")?.to_vec(),
        )?;
        e.agents.push(agent);
        Ok(())
    })
}

/// Number of agents, or 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live economy handle.
#[no_mangle]
pub unsafe extern "C" fn rp_economy_agents(e: *const RpEconomy) -> usize {
    e.as_ref().map_or(0, |e| e.agents.len())
}

fn method(direct: bool) -> DemandMethod {
    if direct {
        DemandMethod::Direct
    } else {
        DemandMethod::ClosedForm
    }
}

/// Aggregate excess demand at prices `p`. With `direct` each agent's demand
/// is solved against its own reference; otherwise the closed form is used.
///
/// # Safety
/// See the module notes on array lengths.
#[no_mangle]
pub unsafe extern "C" fn rp_excess_demand(
    e: *const RpEconomy,
    p: *const f64,
    direct: bool,
    out_excess: *mut f64,
) -> RpStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("economy"))?;
        let l = e.commodities;
        let z = excess_demand_with(&e.agents, &bundle(p, l, "p")?, method(direct))?;
        slice_mut(out_excess, l, "out_excess")?.copy_from_slice(&z);
        Ok(())
    })
}

/// Outcome of `rp_tatonnement`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RpEquilibriumInfo {
    pub excess_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest `|⟨p, z(p)⟩|` relative to total wealth over all iterates.
    pub max_walras_residual: f64,
}

/// Price adjustment from `initial_prices` (null: uniform prices) until
/// `‖z‖∞ ≤ tolerance` or `max_iters`. Writes the normalized prices to
/// `out_prices`. Running out of iterations is not an error; check
/// `converged`.
///
/// # Safety
/// See the module notes on array lengths. `out_info` may be null.
#[no_mangle]
pub unsafe extern "C" fn rp_tatonnement(
    e: *const RpEconomy,
    initial_prices: *const f64,
    step: f64,
    tolerance: f64,
    max_iters: usize,
    direct: bool,
    out_prices: *mut f64,
    out_info: *mut RpEquilibriumInfo,
) -> RpStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("economy"))?;
        let l = e.commodities;
        let initial_prices = if initial_prices.is_null() {
            None
        } else {
            Some(slice(initial_prices, l, "initial_prices")?.to_vec())
        };
        let config = TatonnementConfig {
            initial_prices,
            step,
            tolerance,
            max_iters,
            method: method(direct),
        };
        let eq = tatonnement(&e.agents, &config)?;
        slice_mut(out_prices, l, "out_prices")?.copy_from_slice(&eq.prices);
        if !out_info.is_null() {
            out_info.write(RpEquilibriumInfo {
                excess_norm: eq.excess_norm,
                iterations: eq.iterations,
                converged: eq.converged,
                max_walras_residual: eq.max_walras_residual,
            });
        }
        Ok(())
    })
}
