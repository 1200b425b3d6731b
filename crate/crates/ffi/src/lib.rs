//! C ABI over `v2x-core`.
//!
//! Objects are opaque handles created by `*_new`/`*_load`/`*_from_toml`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a `V2xStatus`; on failure a message is available from
//! `v2x_last_error_message` on the same thread. Strings returned by the
//! library are released with `v2x_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use v2x_core::clearing::Method;
use v2x_core::io::{emit_report, load_scenario, parse_record, parse_scenario, Format};
use v2x_core::model::Money;
use v2x_core::reliability::{prob_lower_bound, ReliabilityError};
use v2x_core::sim::{carbon_proxy, run_scenario, CarbonFactors, GeneratorParams, RunOptions, Scenario, Settlement, SimError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum V2xStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Validate = 5,
    Clear = 6,
    Reliability = 7,
    InvalidArgument = 8,
    Panic = 9,
}

/// Opaque scenario handle.
pub struct V2xScenario(Scenario);

/// Opaque settlement handle.
pub struct V2xSettlement(Settlement);

/// Headline numbers of a run. Money fields are milli-pence.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct V2xKpis {
    pub social_savings: i64,
    pub total_payments: i64,
    pub fines_collected: i64,
    pub served_value: i64,
    pub balancing_cost: i64,
    pub fr_payments: i64,
    pub platform_utility: i64,
    pub contracted_kwh: u64,
    pub delivered_kwh: u64,
    pub unmet_demand_kwh: u64,
    pub fr_export_kwh: u64,
    pub fr_import_kwh: u64,
    pub balancing_kwh: u64,
    pub curtailed_kwh: u64,
    pub grid_kwh: u64,
    pub carbon_g: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no interior nul")));
}

fn fail(status: V2xStatus, msg: impl Into<String>) -> V2xStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> V2xStatus) -> V2xStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(V2xStatus::Panic, msg)
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, V2xStatus> {
    if p.is_null() {
        return Err(fail(V2xStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(V2xStatus::InvalidUtf8, e.to_string()))
}

fn sim_status(e: &SimError) -> V2xStatus {
    match e {
        SimError::Validate(_) => V2xStatus::Validate,
        SimError::Clear(_) => V2xStatus::Clear,
        SimError::Reliability(_) => V2xStatus::Reliability,
        SimError::UnknownAxis(_) | SimError::BadAxisValue { .. } => V2xStatus::InvalidArgument,
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn v2x_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn v2x_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a scenario from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_scenario_from_toml(toml: *const c_char, out: *mut *mut V2xScenario) -> V2xStatus {
    guard(|| {
        if out.is_null() {
            return fail(V2xStatus::NullPointer, "null out pointer");
        }
        let t = match text(toml) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_scenario(t) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(V2xScenario(s)));
                V2xStatus::Ok
            }
            Err(e) => fail(V2xStatus::Parse, e.to_string()),
        }
    })
}

/// Loads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_scenario_load(path: *const c_char, out: *mut *mut V2xScenario) -> V2xStatus {
    guard(|| {
        if out.is_null() {
            return fail(V2xStatus::NullPointer, "null out pointer");
        }
        let p = match text(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_scenario(Path::new(p)) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(V2xScenario(s)));
                V2xStatus::Ok
            }
            Err(e @ v2x_core::io::IoError::File { .. }) => fail(V2xStatus::Io, e.to_string()),
            Err(e) => fail(V2xStatus::Parse, e.to_string()),
        }
    })
}

/// A random scenario with the default generator shape.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_scenario_generate(seed: u64, out: *mut *mut V2xScenario) -> V2xStatus {
    guard(|| {
        if out.is_null() {
            return fail(V2xStatus::NullPointer, "null out pointer");
        }
        *out = Box::into_raw(Box::new(V2xScenario(Scenario::generate(&GeneratorParams::default(), seed))));
        V2xStatus::Ok
    })
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn v2x_scenario_set_seed(scenario: *mut V2xScenario, seed: u64) -> V2xStatus {
    guard(|| match scenario.as_mut() {
        Some(s) => {
            s.0.seed = seed;
            V2xStatus::Ok
        }
        None => fail(V2xStatus::NullPointer, "null scenario"),
    })
}

/// Serializes a scenario back to TOML.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_scenario_to_toml(scenario: *const V2xScenario, out: *mut *mut c_char) -> V2xStatus {
    guard(|| {
        let Some(s) = scenario.as_ref() else { return fail(V2xStatus::NullPointer, "null scenario") };
        if out.is_null() {
            return fail(V2xStatus::NullPointer, "null out pointer");
        }
        match v2x_core::io::scenario_to_toml(&s.0) {
            Ok(t) => {
                *out = CString::new(t).expect("no interior nul").into_raw();
                V2xStatus::Ok
            }
            Err(e) => fail(V2xStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `scenario` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn v2x_scenario_free(scenario: *mut V2xScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs a full seeded day. `oracle` selects exhaustive clearing.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_simulate(scenario: *const V2xScenario, oracle: bool, out: *mut *mut V2xSettlement) -> V2xStatus {
    guard(|| {
        let Some(s) = scenario.as_ref() else { return fail(V2xStatus::NullPointer, "null scenario") };
        if out.is_null() {
            return fail(V2xStatus::NullPointer, "null out pointer");
        }
        let opts = RunOptions { method: if oracle { Method::Oracle } else { Method::Dp }, ..RunOptions::default() };
        match run_scenario(&s.0, &opts) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(V2xSettlement(r)));
                V2xStatus::Ok
            }
            Err(e) => fail(sim_status(&e), e.to_string()),
        }
    })
}

/// Parses a machine record.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_settlement_from_json(json: *const c_char, out: *mut *mut V2xSettlement) -> V2xStatus {
    guard(|| {
        if out.is_null() {
            return fail(V2xStatus::NullPointer, "null out pointer");
        }
        let t = match text(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_record(t.as_bytes()) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(V2xSettlement(r)));
                V2xStatus::Ok
            }
            Err(e) => fail(V2xStatus::Parse, e.to_string()),
        }
    })
}

/// The machine record (JSON). Free the result with `v2x_string_free`.
///
/// # Safety
/// `settlement` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_settlement_to_json(settlement: *const V2xSettlement, out: *mut *mut c_char) -> V2xStatus {
    report(settlement, Format::Machine, out)
}

/// The human-readable report. Free the result with `v2x_string_free`.
///
/// # Safety
/// `settlement` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_settlement_to_text(settlement: *const V2xSettlement, out: *mut *mut c_char) -> V2xStatus {
    report(settlement, Format::Human, out)
}

unsafe fn report(settlement: *const V2xSettlement, format: Format, out: *mut *mut c_char) -> V2xStatus {
    guard(|| {
        let Some(s) = settlement.as_ref() else { return fail(V2xStatus::NullPointer, "null settlement") };
        if out.is_null() {
            return fail(V2xStatus::NullPointer, "null out pointer");
        }
        *out = CString::new(emit_report(&s.0, format)).expect("no interior nul").into_raw();
        V2xStatus::Ok
    })
}

/// # Safety
/// `settlement` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_settlement_kpis(settlement: *const V2xSettlement, out: *mut V2xKpis) -> V2xStatus {
    guard(|| {
        let Some(s) = settlement.as_ref() else { return fail(V2xStatus::NullPointer, "null settlement") };
        let Some(out) = out.as_mut() else { return fail(V2xStatus::NullPointer, "null out pointer") };
        let k = &s.0.kpis;
        *out = V2xKpis {
            social_savings: k.social_savings.millipence(),
            total_payments: k.total_payments.millipence(),
            fines_collected: k.fines_collected.millipence(),
            served_value: k.served_value.millipence(),
            balancing_cost: k.balancing_cost.millipence(),
            fr_payments: k.fr_payments.millipence(),
            platform_utility: k.platform_utility.millipence(),
            contracted_kwh: k.contracted_kwh,
            delivered_kwh: k.delivered_kwh,
            unmet_demand_kwh: k.unmet_demand_kwh,
            fr_export_kwh: k.fr_export_kwh,
            fr_import_kwh: k.fr_import_kwh,
            balancing_kwh: k.balancing_kwh,
            curtailed_kwh: k.curtailed_kwh,
            grid_kwh: k.grid_kwh,
            carbon_g: k.carbon_g,
        };
        V2xStatus::Ok
    })
}

/// Number of accepted contracts; their ids are written to `ids` up to `capacity`.
///
/// # Safety
/// `settlement` must be a live handle; `ids` must hold `capacity` values or be NULL with `capacity == 0`.
#[no_mangle]
pub unsafe extern "C" fn v2x_settlement_accepted(settlement: *const V2xSettlement, ids: *mut u32, capacity: usize) -> usize {
    let Some(s) = settlement.as_ref() else { return 0 };
    let accepted = &s.0.allocation.accepted;
    if !ids.is_null() {
        for (i, id) in accepted.iter().take(capacity).enumerate() {
            *ids.add(i) = id.0;
        }
    }
    accepted.len()
}

/// # Safety
/// `settlement` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn v2x_settlement_free(settlement: *mut V2xSettlement) {
    if !settlement.is_null() {
        drop(Box::from_raw(settlement));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn v2x_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Lower bound on a contract's success probability from its fine and total bid (milli-pence).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn v2x_prob_lower_bound(fine_millipence: i64, bid_total_millipence: i64, out: *mut f64) -> V2xStatus {
    guard(|| {
        let Some(out) = out.as_mut() else { return fail(V2xStatus::NullPointer, "null out pointer") };
        match prob_lower_bound(Money(fine_millipence), Money(bid_total_millipence)) {
            Ok(p) => {
                *out = p;
                V2xStatus::Ok
            }
            Err(e @ ReliabilityError::ZeroFine) => fail(V2xStatus::InvalidArgument, e.to_string()),
            Err(e) => fail(V2xStatus::Reliability, e.to_string()),
        }
    })
}

/// Grams of CO2 for the given balancing and grid energy.
#[no_mangle]
pub extern "C" fn v2x_carbon_proxy(balancing_kwh: u64, grid_kwh: u64, grid_g_per_kwh: f64, balancing_g_per_kwh: f64) -> f64 {
    carbon_proxy(balancing_kwh, grid_kwh, &CarbonFactors { grid_g_per_kwh, balancing_g_per_kwh })
}
