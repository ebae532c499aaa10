//! C ABI for `spindir`.
//!
//! Each call returns a [`SpindirStatus`]; results go through out-pointers.
//! After a failure, [`spindir_last_error_message`] describes it. Handles are
//! opaque and released with their `_free` function. Spin arguments are twice
//! their value (`ma2 = 1` means `m_A = 1/2`).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spindir::fidelity::{best_fidelity, optimal_fidelity, FidelityResult};
use spindir::jacobi::{largest_zero, JacobiParams};
use spindir::montecarlo::simulate;
use spindir::povm::{octahedron_povm, tetrahedron_povm, verify_completeness, PovmSpec};
use spindir::{Error, HalfInt};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpindirStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Unsupported = 3,
    Numeric = 4,
    Precondition = 5,
    Parse = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Fidelity, optimal state and effective dimension for one `(N, m_A, m_B)`.
pub struct SpindirFidelityResult {
    inner: FidelityResult,
}

/// A decoding measurement.
pub struct SpindirPovm {
    inner: PovmSpec,
}

/// Monte Carlo summary. `target` is the analytic fidelity for the simulated state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpindirSimReport {
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
    pub target: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SpindirStatus {
    match e {
        Error::Domain(_) => SpindirStatus::Domain,
        Error::Unsupported(_) => SpindirStatus::Unsupported,
        Error::Numeric(_) => SpindirStatus::Numeric,
        Error::Precondition(_) => SpindirStatus::Precondition,
        Error::Parse(_) => SpindirStatus::Parse,
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guarded<F: FnOnce() -> Result<(), (SpindirStatus, String)>>(f: F) -> SpindirStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpindirStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SpindirStatus::Panic
        }
    }
}

fn lib<T>(r: spindir::Result<T>) -> Result<T, (SpindirStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SpindirStatus, String) {
    (SpindirStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (SpindirStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null, and the caller guarantees it is valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn spins(n: u32) -> Result<HalfInt, (SpindirStatus, String)> {
    i32::try_from(n)
        .map(HalfInt::from_twice)
        .map_err(|_| (SpindirStatus::Domain, format!("N = {n} is out of range")))
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn spindir_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Optimal fidelity `F_N`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_optimal_fidelity(n_spins: u32, out: *mut f64) -> SpindirStatus {
    guarded(|| {
        let f = lib(optimal_fidelity(n_spins))?.fidelity;
        write_out(out, f, "out")
    })
}

/// Best fidelity for `N` spins with projections `ma2 / 2` and `mb2 / 2`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_fidelity(
    n_spins: u32,
    ma2: i32,
    mb2: i32,
    out: *mut f64,
) -> SpindirStatus {
    guarded(|| {
        let j = spins(n_spins)?;
        let f = lib(best_fidelity(
            j,
            HalfInt::from_twice(ma2),
            HalfInt::from_twice(mb2),
        ))?
        .fidelity;
        write_out(out, f, "out")
    })
}

/// Largest zero of `P_n^{a,b}`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_jacobi_largest_zero(
    n: u32,
    a: u32,
    b: u32,
    out: *mut f64,
) -> SpindirStatus {
    guarded(|| {
        let x = lib(largest_zero(JacobiParams::new(n, a, b)))?.largest_zero;
        write_out(out, x, "out")
    })
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_fidelity_result_new(
    n_spins: u32,
    ma2: i32,
    mb2: i32,
    out: *mut *mut SpindirFidelityResult,
) -> SpindirStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let j = spins(n_spins)?;
        let inner = lib(best_fidelity(
            j,
            HalfInt::from_twice(ma2),
            HalfInt::from_twice(mb2),
        ))?;
        write_out(
            out,
            Box::into_raw(Box::new(SpindirFidelityResult { inner })),
            "out",
        )
    })
}

/// Borrow a handle; `None` for null.
///
/// # Safety
/// `h` must be null or a live handle from this library.
unsafe fn handle<'a, T>(h: *const T) -> Option<&'a T> {
    h.as_ref()
}

/// `F`, or NaN for a null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn spindir_fidelity_result_fidelity(h: *const SpindirFidelityResult) -> f64 {
    // SAFETY: the caller passes null or a live handle.
    unsafe { handle(h) }.map_or(f64::NAN, |r| r.inner.fidelity)
}

/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn spindir_fidelity_result_top_eigenvalue(
    h: *const SpindirFidelityResult,
) -> f64 {
    // SAFETY: the caller passes null or a live handle.
    unsafe { handle(h) }.map_or(f64::NAN, |r| r.inner.top_eigenvalue)
}

/// Effective dimension `(J+1)² - m²`, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn spindir_fidelity_result_effective_dimension(
    h: *const SpindirFidelityResult,
) -> u64 {
    // SAFETY: the caller passes null or a live handle.
    unsafe { handle(h) }.map_or(0, |r| r.inner.effective_dimension)
}

/// Number of optimal-state components.
///
/// # Safety
/// `h` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn spindir_fidelity_result_state_len(
    h: *const SpindirFidelityResult,
) -> usize {
    // SAFETY: the caller passes null or a live handle.
    unsafe { handle(h) }.map_or(0, |r| r.inner.optimal_state.components().len())
}

/// Copies the optimal-state components `A_j`, lowest `j` first, into `buf`.
///
/// # Safety
/// `h` must be null or a live handle from this library.
/// `buf` must be null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_fidelity_result_state(
    h: *const SpindirFidelityResult,
    buf: *mut f64,
    len: usize,
) -> SpindirStatus {
    guarded(|| {
        // SAFETY: the caller passes null or a live handle.
        let r = unsafe { handle(h) }.ok_or_else(|| null("handle"))?;
        let comps = r.inner.optimal_state.components();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < comps.len() {
            return Err((
                SpindirStatus::BufferTooSmall,
                format!("need {} slots, got {len}", comps.len()),
            ));
        }
        // SAFETY: `buf` holds at least `len >= comps.len()` writable doubles.
        unsafe { ptr::copy_nonoverlapping(comps.as_ptr(), buf, comps.len()) };
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn spindir_fidelity_result_free(h: *mut SpindirFidelityResult) {
    if !h.is_null() {
        // SAFETY: `h` came from `Box::into_raw` in this library and is freed once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn new_povm(spec: spindir::Result<PovmSpec>, out: *mut *mut SpindirPovm) -> SpindirStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = lib(spec)?;
        write_out(out, Box::into_raw(Box::new(SpindirPovm { inner })), "out")
    })
}

/// Tetrahedron POVM for two spins.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_povm_tetrahedron(out: *mut *mut SpindirPovm) -> SpindirStatus {
    new_povm(Ok(tetrahedron_povm()), out)
}

/// Octahedron POVM for three spins; `mb2` is 1 or 3.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_povm_octahedron(
    mb2: i32,
    out: *mut *mut SpindirPovm,
) -> SpindirStatus {
    new_povm(octahedron_povm(HalfInt::from_twice(mb2)), out)
}

/// Continuous POVM with `J = j2 / 2`, `m_B = mb2 / 2`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_povm_continuous(
    j2: i32,
    mb2: i32,
    out: *mut *mut SpindirPovm,
) -> SpindirStatus {
    new_povm(
        PovmSpec::continuous(HalfInt::from_twice(j2), HalfInt::from_twice(mb2)),
        out,
    )
}

/// Completeness residual `max |Σ O_r - 1|`.
///
/// # Safety
/// `h` must be null or a live handle from this library.
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_povm_completeness(
    h: *const SpindirPovm,
    out: *mut f64,
) -> SpindirStatus {
    guarded(|| {
        // SAFETY: the caller passes null or a live handle.
        let p = unsafe { handle(h) }.ok_or_else(|| null("handle"))?;
        write_out(out, verify_completeness(&p.inner), "out")
    })
}

/// JSON description `{J2, mB2, kind, outcomes}`; release with [`spindir_string_free`].
///
/// # Safety
/// `h` must be null or a live handle from this library.
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_povm_to_json(
    h: *const SpindirPovm,
    out: *mut *mut c_char,
) -> SpindirStatus {
    guarded(|| {
        // SAFETY: the caller passes null or a live handle.
        let p = unsafe { handle(h) }.ok_or_else(|| null("handle"))?;
        let s = CString::new(p.inner.to_json().to_string()).expect("JSON has no NUL");
        write_out(out, s.into_raw(), "out")
    })
}

/// # Safety
/// `h` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn spindir_povm_free(h: *mut SpindirPovm) {
    if !h.is_null() {
        // SAFETY: `h` came from `Box::into_raw` in this library and is freed once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `s` must be null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn spindir_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw` in this library and is freed once.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Simulates the best state for the POVM's reference projection with a discrete
/// POVM on one worker.
///
/// # Safety
/// `h` must be null or a live handle from this library.
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spindir_simulate(
    h: *const SpindirPovm,
    trials: u64,
    seed: u64,
    out: *mut SpindirSimReport,
) -> SpindirStatus {
    guarded(|| {
        // SAFETY: the caller passes null or a live handle.
        let p = unsafe { handle(h) }.ok_or_else(|| null("handle"))?;
        let r = p.inner.reference();
        let best = lib(best_fidelity(r.j_max(), r.m_b(), r.m_b()))?;
        let report = lib(simulate(&best.optimal_state, &p.inner, trials, seed))?;
        write_out(
            out,
            SpindirSimReport {
                trials: report.trials,
                seed: report.seed,
                mean: report.mean_fidelity,
                std_error: report.std_error,
                target: best.fidelity,
            },
            "out",
        )
    })
}
