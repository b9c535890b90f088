//! C ABI for the concap solver.
//!
//! Conventions: every fallible function returns a `ConcapStatus`; results are
//! written through out-pointers that are touched only on `Ok`. A thread-local
//! message with the details of the last failure is available through
//! [`concap_last_error_message`]. The constellation handle is an opaque
//! builder; disks are validated when a computation runs.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use concap::geometry::{ConstraintKind, ConstraintSpec, Constellation, HyperbolicDisk};
use concap::optim::{multistart, OptimizationProblem, OptimizeOptions};
use concap::{bie, specialfn, Error};

/// Status code of every fallible call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcapStatus {
    Ok = 0,
    /// Argument outside its mathematical domain.
    DomainError = 1,
    /// Disks overlap or touch.
    OverlapError = 2,
    /// No feasible configuration exists or the start is infeasible.
    InfeasibleError = 3,
    /// Iterative solver missed its tolerance.
    NonConvergence = 4,
    /// Linear system numerically singular.
    SingularSystem = 5,
    InvalidArgument = 6,
    /// Null pointer passed where an object was required.
    NullPointer = 7,
    /// Unexpected internal failure.
    InternalError = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg.to_string());
}

fn status_of(err: &Error) -> ConcapStatus {
    match err {
        Error::Domain(_) => ConcapStatus::DomainError,
        Error::Overlap(_) => ConcapStatus::OverlapError,
        Error::Infeasible(_) => ConcapStatus::InfeasibleError,
        Error::GmresNonConvergence { .. } => ConcapStatus::NonConvergence,
        Error::SingularSystem(_) => ConcapStatus::SingularSystem,
        Error::InvalidArgument(_) | Error::Config(_) => ConcapStatus::InvalidArgument,
        Error::Io(_) => ConcapStatus::InternalError,
    }
}

fn run<T>(out: *mut T, body: impl FnOnce() -> Result<T, Error>) -> ConcapStatus {
    if out.is_null() {
        set_error("null output pointer");
        return ConcapStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(value)) => {
            unsafe { *out = value };
            ConcapStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            ConcapStatus::InternalError
        }
    }
}

/// Opaque constellation builder.
pub struct ConcapConstellation {
    disks: Vec<HyperbolicDisk>,
}

/// Creates an empty constellation builder; free with
/// [`concap_constellation_free`].
#[no_mangle]
pub extern "C" fn concap_constellation_new() -> *mut ConcapConstellation {
    Box::into_raw(Box::new(ConcapConstellation { disks: Vec::new() }))
}

/// Releases a builder. Passing null is a no-op.
#[no_mangle]
pub extern "C" fn concap_constellation_free(c: *mut ConcapConstellation) {
    if !c.is_null() {
        drop(unsafe { Box::from_raw(c) });
    }
}

/// Appends a hyperbolic disk with center (cx, cy) and hyperbolic radius r.
#[no_mangle]
pub extern "C" fn concap_constellation_add_disk(
    c: *mut ConcapConstellation,
    cx: f64,
    cy: f64,
    r: f64,
) -> ConcapStatus {
    if c.is_null() {
        set_error("null constellation");
        return ConcapStatus::NullPointer;
    }
    let mut ok = false;
    let status = run(&mut ok, || {
        let disk = HyperbolicDisk::new(Complex64::new(cx, cy), r)?;
        unsafe { &mut *c }.disks.push(disk);
        Ok(true)
    });
    status
}

/// Number of disks currently in the builder; 0 for null.
#[no_mangle]
pub extern "C" fn concap_constellation_len(c: *const ConcapConstellation) -> usize {
    if c.is_null() {
        0
    } else {
        unsafe { &*c }.disks.len()
    }
}

/// Capacity of the condenser formed by the unit disk and the constellation,
/// discretized with n points per boundary component (even, >= 16).
#[no_mangle]
pub extern "C" fn concap_capacity(
    c: *const ConcapConstellation,
    n: usize,
    out_cap: *mut f64,
) -> ConcapStatus {
    if c.is_null() {
        set_error("null constellation");
        return ConcapStatus::NullPointer;
    }
    run(out_cap, || {
        let constellation = Constellation::new(unsafe { &*c }.disks.clone())?;
        Ok(bie::capacity(&constellation, n)?.cap)
    })
}

/// Per-disk capacity contributions b_k; `out_b` must hold as many doubles as
/// there are disks.
#[no_mangle]
pub extern "C" fn concap_capacity_contributions(
    c: *const ConcapConstellation,
    n: usize,
    out_b: *mut f64,
) -> ConcapStatus {
    if c.is_null() || out_b.is_null() {
        set_error("null pointer");
        return ConcapStatus::NullPointer;
    }
    let mut cap = 0.0;
    let status = run(&mut cap, || {
        let disks = unsafe { &*c }.disks.clone();
        let m = disks.len();
        let constellation = Constellation::new(disks)?;
        let result = bie::capacity(&constellation, n)?;
        let out = unsafe { std::slice::from_raw_parts_mut(out_b, m) };
        out.copy_from_slice(&result.b);
        Ok(result.cap)
    });
    status
}

/// Hyperbolic distance between (ax, ay) and (bx, by) in the unit disk.
#[no_mangle]
pub extern "C" fn concap_hyp_distance(
    ax: f64,
    ay: f64,
    bx: f64,
    by: f64,
    out: *mut f64,
) -> ConcapStatus {
    run(out, || {
        concap::geometry::hyp_distance(Complex64::new(ax, ay), Complex64::new(bx, by))
    })
}

/// Closed-form capacity of a single hyperbolic disk of radius r.
#[no_mangle]
pub extern "C" fn concap_hyp_disk_capacity(r: f64, out: *mut f64) -> ConcapStatus {
    run(out, || specialfn::hyp_disk_capacity(r))
}

/// Hyperbolic radius of the centered disk with the given capacity.
#[no_mangle]
pub extern "C" fn concap_condense_radius(cap: f64, out: *mut f64) -> ConcapStatus {
    run(out, || specialfn::condense_radius(cap))
}

/// The Grotzsch modulus mu(r), r in (0, 1).
#[no_mangle]
pub extern "C" fn concap_mu(r: f64, out: *mut f64) -> ConcapStatus {
    run(out, || specialfn::mu(r))
}

/// Complete elliptic integral K(r) in the modulus convention, r in [0, 1).
#[no_mangle]
pub extern "C" fn concap_ellip_k(r: f64, out: *mut f64) -> ConcapStatus {
    run(out, || specialfn::ellip_k(r))
}

/// Capacity of one hyperbolic segment of length l.
#[no_mangle]
pub extern "C" fn concap_segment_capacity(l: f64, out: *mut f64) -> ConcapStatus {
    run(out, || specialfn::segment_capacity(l))
}

/// Capacity of five radial segments of length l merged at the origin.
#[no_mangle]
pub extern "C" fn concap_star_capacity_5(l: f64, out: *mut f64) -> ConcapStatus {
    run(out, || specialfn::star_capacity_5(l))
}

/// Center constraint kinds for [`concap_maximize`].
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcapConstraintKind {
    /// Centers in the closed disk |z| <= r_max.
    Disk = 0,
    /// Centers on the real interval [-r_max, r_max].
    Interval = 1,
}

/// Maximizes the capacity of m disks with the given hyperbolic radii over
/// their centers. `radii` holds m values; `out_centers` must hold 2 m doubles
/// and receives the centers interleaved as x0, y0, x1, y1, ...; the achieved
/// capacity lands in `out_cap`. Deterministic for a fixed seed.
#[no_mangle]
pub extern "C" fn concap_maximize(
    radii: *const f64,
    m: usize,
    kind: ConcapConstraintKind,
    r_max: f64,
    seed: u64,
    starts: usize,
    out_cap: *mut f64,
    out_centers: *mut f64,
) -> ConcapStatus {
    if radii.is_null() || out_centers.is_null() {
        set_error("null pointer");
        return ConcapStatus::NullPointer;
    }
    run(out_cap, || {
        let radii = unsafe { std::slice::from_raw_parts(radii, m) }.to_vec();
        let kind = match kind {
            ConcapConstraintKind::Disk => ConstraintKind::DiskCenters,
            ConcapConstraintKind::Interval => ConstraintKind::IntervalCenters,
        };
        let problem = OptimizationProblem::new(radii, ConstraintSpec::new(kind, r_max)?)?;
        let runs = multistart(&problem, starts.max(1), seed, &OptimizeOptions::default())?;
        let best = &runs[0];
        let out = unsafe { std::slice::from_raw_parts_mut(out_centers, 2 * m) };
        for (i, z) in best.centers.iter().enumerate() {
            out[2 * i] = z.re;
            out[2 * i + 1] = z.im;
        }
        Ok(best.cap)
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn concap_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    CStr::from_bytes_with_nul(VERSION.as_bytes())
        .expect("static version string")
        .as_ptr()
}

/// Copies the last error message of this thread into `buf` (at most `len`
/// bytes including the NUL terminator) and returns the full message length.
#[no_mangle]
pub extern "C" fn concap_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}
