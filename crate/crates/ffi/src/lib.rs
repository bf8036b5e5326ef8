//! C ABI over `debris_linker`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns a
//! [`DlStatus`]; on failure `dl_last_error_message` describes the error for
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use debris_linker::classical::{gibbs_from_track, keplerian_integrals_link};
use debris_linker::elements::KeplerianElements;
use debris_linker::lambert::LambertCase;
use debris_linker::linkage::{newton_solve, LinkageOptions, LinkageSolution, Method, SolutionMethod};
use debris_linker::observer::StationSpec;
use debris_linker::radar::{interpolate_track, parse_attributable, parse_track, Attributable, RadarTrack};
use debris_linker::time::Epoch;
use debris_linker::{Error, MU_EARTH};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    DegenerateTimes = 4,
    NoSolution = 5,
    Computation = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// Linkage method for [`dl_link`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlMethod {
    InfangLinear = 0,
    InfangQuadratic = 1,
    KeplerianIntegrals = 2,
}

/// Orbital elements, angles in degrees.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DlElements {
    pub epoch_mjd: f64,
    pub a_km: f64,
    pub e: f64,
    pub inc_deg: f64,
    pub raan_deg: f64,
    pub argp_deg: f64,
    pub mean_anomaly_deg: f64,
}

/// One linkage solution.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DlSolution {
    /// 0 linear, 1 and 2 quadratic roots, 3 Keplerian integrals.
    pub method: u32,
    /// Revolutions of the Lambert branch, −1 when none.
    pub revolutions: i32,
    /// Lambert case 1 to 4, 0 when none.
    pub lambert_case: u32,
    pub preferred: bool,
    pub iterations: u32,
    pub residual: f64,
    /// Angle corrections (Δα₁, Δδ₁, Δα₂, Δδ₂), rad.
    pub delta: [f64; 4],
    pub first: DlElements,
    pub second: DlElements,
}

/// Opaque attributable handle.
pub struct DlAttributable(Attributable);

/// Opaque radar track handle.
pub struct DlTrack(RadarTrack);

/// Opaque list of linkage solutions.
pub struct DlSolutionSet(Vec<DlSolution>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DlStatus {
    match e {
        Error::Parse { .. } => DlStatus::Parse,
        Error::InvalidInput(_) | Error::Io(_) | Error::TooFewObservations { .. } | Error::PolarSingularity { .. } => {
            DlStatus::InvalidInput
        }
        Error::DegenerateTimes => DlStatus::DegenerateTimes,
        Error::NoBranch | Error::NoRealRoot { .. } => DlStatus::NoSolution,
        _ => DlStatus::Computation,
    }
}

/// Runs `f`, recording any error or panic for `dl_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), (DlStatus, String)>) -> DlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside debris_linker".into());
            DlStatus::Panic
        }
    }
}

fn lib(e: Error) -> (DlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DlStatus, String) {
    (DlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (DlStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (DlStatus::InvalidInput, format!("{what} is not UTF-8")))
}

fn elements(el: &KeplerianElements) -> DlElements {
    DlElements {
        epoch_mjd: el.epoch.mjd(),
        a_km: el.a,
        e: el.e,
        inc_deg: el.inc.to_degrees(),
        raan_deg: el.raan.to_degrees(),
        argp_deg: el.argp.to_degrees(),
        mean_anomaly_deg: el.mean_anomaly.to_degrees(),
    }
}

fn solution(s: &LinkageSolution) -> DlSolution {
    let method = match s.method {
        SolutionMethod::Linear => 0,
        SolutionMethod::QuadraticRoot1 => 1,
        SolutionMethod::QuadraticRoot2 => 2,
        SolutionMethod::Ki => 3,
    };
    let (revolutions, lambert_case) = match s.branch {
        Some(b) => {
            let case = match b.case {
                LambertCase::I => 1,
                LambertCase::II => 2,
                LambertCase::III => 3,
                LambertCase::IV => 4,
            };
            (b.k as i32, case)
        }
        None => (-1, 0),
    };
    let d = s.delta.to_vec();
    DlSolution {
        method,
        revolutions,
        lambert_case,
        preferred: s.preferred,
        iterations: s.iterations as u32,
        residual: s.residual_norm,
        delta: [d[0], d[1], d[2], d[3]],
        first: elements(&s.elements[0]),
        second: elements(&s.elements[1]),
    }
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds an attributable from its mean epoch (integer MJD plus day
/// fraction), angles in degrees, range in km and its rates in km/s and km/s²,
/// and the station's geocentric latitude, longitude (deg) and radius (km).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn dl_attributable_new(
    mjd_day: i64,
    mjd_fraction: f64,
    alpha_deg: f64,
    delta_deg: f64,
    rho_km: f64,
    rho_dot_km_s: f64,
    rho_ddot_km_s2: f64,
    station_lat_deg: f64,
    station_lon_deg: f64,
    station_radius_km: f64,
    out: *mut *mut DlAttributable,
) -> DlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let station = StationSpec::from_degrees("FFI", station_lat_deg, station_lon_deg, station_radius_km).map_err(lib)?;
        let att = Attributable::new(
            Epoch::from_parts(mjd_day, mjd_fraction),
            alpha_deg.to_radians(),
            delta_deg.to_radians(),
            rho_km,
            rho_dot_km_s,
            rho_ddot_km_s2,
            station,
        )
        .map_err(lib)?;
        *out = Box::into_raw(Box::new(DlAttributable(att)));
        Ok(())
    })
}

/// Parses an attributable from the JSON written by `debris-linker interpolate`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_attributable_from_json(json: *const c_char, out: *mut *mut DlAttributable) -> DlStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(DlAttributable(parse_attributable(text).map_err(lib)?)));
        Ok(())
    })
}

/// # Safety
/// `att` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dl_attributable_free(att: *mut DlAttributable) {
    if !att.is_null() {
        drop(Box::from_raw(att));
    }
}

/// Parses a radar track file's text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_track_parse(text: *const c_char, out: *mut *mut DlTrack) -> DlStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(DlTrack(parse_track(text).map_err(lib)?)));
        Ok(())
    })
}

/// # Safety
/// `track` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dl_track_free(track: *mut DlTrack) {
    if !track.is_null() {
        drop(Box::from_raw(track));
    }
}

/// Reduces a track to its attributable.
///
/// # Safety
/// `track` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_track_attributable(track: *const DlTrack, out: *mut *mut DlAttributable) -> DlStatus {
    guard(|| {
        let track = track.as_ref().ok_or_else(|| null("track"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(DlAttributable(interpolate_track(&track.0).map_err(lib)?)));
        Ok(())
    })
}

/// Gibbs orbit of a track (observations 1, 2 and 4).
///
/// # Safety
/// `track` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_gibbs(track: *const DlTrack, out: *mut DlElements) -> DlStatus {
    guard(|| {
        let track = track.as_ref().ok_or_else(|| null("track"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let (_, el) = gibbs_from_track(&track.0, MU_EARTH).map_err(lib)?;
        *out = elements(&el);
        Ok(())
    })
}

/// Links two attributables. An empty solution set is reported as
/// `NoSolution` with the per-branch failures in the error message; no set is
/// returned in that case.
///
/// # Safety
/// `first` and `second` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_link(
    first: *const DlAttributable,
    second: *const DlAttributable,
    method: DlMethod,
    out: *mut *mut DlSolutionSet,
) -> DlStatus {
    guard(|| {
        let a1 = first.as_ref().ok_or_else(|| null("first"))?;
        let a2 = second.as_ref().ok_or_else(|| null("second"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (sols, why) = match method {
            DlMethod::KeplerianIntegrals => (keplerian_integrals_link(&a1.0, &a2.0, MU_EARTH).map_err(lib)?, Vec::new()),
            DlMethod::InfangLinear | DlMethod::InfangQuadratic => {
                let m = if method == DlMethod::InfangLinear { Method::Linear } else { Method::Quadratic };
                let outcome = newton_solve(&a1.0, &a2.0, m, &LinkageOptions::default()).map_err(lib)?;
                let why = outcome.failures.iter().map(|f| f.error.to_string()).collect();
                (outcome.solutions, why)
            }
        };
        if sols.is_empty() {
            let msg = if why.is_empty() { "no solution".to_string() } else { why.join("; ") };
            return Err((DlStatus::NoSolution, msg));
        }
        *out = Box::into_raw(Box::new(DlSolutionSet(sols.iter().map(solution).collect())));
        Ok(())
    })
}

/// Number of solutions in a set; 0 for null.
///
/// # Safety
/// `set` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dl_solution_set_len(set: *const DlSolutionSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Copies solution `index` (preferred first) into `out`.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_solution_set_get(set: *const DlSolutionSet, index: usize, out: *mut DlSolution) -> DlStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("set"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let s = set.0.get(index).ok_or_else(|| (DlStatus::OutOfRange, format!("index {index} of {}", set.0.len())))?;
        *out = *s;
        Ok(())
    })
}

/// # Safety
/// `set` must come from [`dl_link`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dl_solution_set_free(set: *mut DlSolutionSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}
