//! C bindings for the `ancs` photon-statistics library.
//!
//! The API follows the usual C conventions: families are opaque handles
//! created by [`ancs_family_new`] and released by [`ancs_family_free`];
//! every fallible call returns an [`AncsStatus`] and writes its result
//! through out-pointers; variable-length results use a caller-supplied
//! buffer with a size-query protocol (call with capacity 0 to learn the
//! required length). The header `include/ancs.h` is generated from this
//! file by cbindgen at build time.
//!
//! All functions catch Rust panics at the boundary and convert them to
//! [`AncsStatus::InternalError`], so no unwinding ever crosses into C.

use std::ffi::CStr;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ancs::an_core::{bernoulli_transform, AnError, AnFamily};
use ancs::families::{make_family, FamilySpec};
use ancs::helstrom::{find_hb_zeros, helstrom_of_nbar, HelstromError};
use ancs::specfun::SpecFunError;

/// Outcome of a C API call; zero means success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncsStatus {
    /// The call succeeded and all out-pointers are populated.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A name or parameter was rejected before any evaluation started.
    InvalidArgument = 2,
    /// The inputs were well-formed but outside the mathematical domain
    /// (negative intensity, unreachable mean count, efficiency above one).
    DomainError = 3,
    /// An internal iteration hit its limit without reaching tolerance.
    NoConvergence = 4,
    /// The supplied buffer is shorter than the result; the required
    /// length has been written through the length out-pointer.
    BufferTooSmall = 5,
    /// A bug: an unexpected panic was caught at the language boundary.
    InternalError = 6,
}

/// Opaque handle to a generalized-coherent-state family.
pub struct AncsFamily {
    inner: AnFamily,
}

/// Vacuum-versus-state discrimination summary at one mean count.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncsHelstrom {
    /// Mean count of the prepared state, before detector losses.
    pub nbar: f64,
    /// Detection efficiency used for the evaluation.
    pub eta: f64,
    /// Prior weight of the vacuum hypothesis.
    pub xi0: f64,
    /// Squared vacuum overlap of the detected state.
    pub overlap_sq: f64,
    /// Minimum error probability over all quantum measurements.
    pub p_h: f64,
    /// Overlap excess relative to a Poissonian state of the same
    /// detected mean; its sign classifies the family.
    pub delta: f64,
}

fn specfun_status(e: &SpecFunError) -> AncsStatus {
    match e {
        SpecFunError::Domain { .. } | SpecFunError::Overflow { .. } => AncsStatus::DomainError,
        SpecFunError::NoConvergence { .. } | SpecFunError::QuadratureNoConvergence { .. } => {
            AncsStatus::NoConvergence
        }
    }
}

fn an_status(e: &AnError) -> AncsStatus {
    match e {
        AnError::DomainU { .. } | AnError::DomainNbar { .. } | AnError::DomainEta { .. } => {
            AncsStatus::DomainError
        }
        AnError::SpecFun(inner) => specfun_status(inner),
        AnError::NoConvergence { .. } => AncsStatus::NoConvergence,
    }
}

fn helstrom_status(e: &HelstromError) -> AncsStatus {
    match e {
        HelstromError::InvalidOverlap(_)
        | HelstromError::InvalidPrior(_)
        | HelstromError::InvalidEta(_)
        | HelstromError::InvalidGrid => AncsStatus::InvalidArgument,
        HelstromError::Family(inner) => an_status(inner),
    }
}

/// Runs `body`, turning any panic into [`AncsStatus::InternalError`]. The
/// handles hold no interior mutability, so a caught panic cannot leave
/// torn state behind.
fn guarded(body: impl FnOnce() -> AncsStatus) -> AncsStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(AncsStatus::InternalError)
}

/// Returns the library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ancs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Returns a static NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn ancs_status_message(status: AncsStatus) -> *const c_char {
    let msg: &'static str = match status {
        AncsStatus::Ok => "ok\0",
        AncsStatus::NullArgument => "a required pointer argument was null\0",
        AncsStatus::InvalidArgument => "unknown name or invalid parameter\0",
        AncsStatus::DomainError => "input outside the mathematical domain\0",
        AncsStatus::NoConvergence => "iteration failed to converge\0",
        AncsStatus::BufferTooSmall => "buffer too small for the result\0",
        AncsStatus::InternalError => "internal error (caught panic)\0",
    };
    msg.as_ptr().cast()
}

/// Creates a family handle and stores it in `*out`.
///
/// `kind` selects the family: `"gs"`, `"spin"`, `"perelomov"`,
/// `"barut_girardello"`, `"hermite"`, `"abel"`, `"sg"`, or `"sgm"`.
/// Families with a parameter take exactly one: `n_j` for spin, `kappa`
/// for perelomov and barut_girardello, `a` for hermite, `beta` for abel.
/// Pass it as `param_name`/`param_value`; pass a null `param_name` (the
/// value is then ignored) for the parameter-free kinds.
///
/// On success the handle must be released with [`ancs_family_free`].
///
/// # Safety
///
/// `kind` and a non-null `param_name` must point to NUL-terminated
/// strings, and `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ancs_family_new(
    kind: *const c_char,
    param_name: *const c_char,
    param_value: f64,
    out: *mut *mut AncsFamily,
) -> AncsStatus {
    if kind.is_null() || out.is_null() {
        return AncsStatus::NullArgument;
    }
    let kind = match CStr::from_ptr(kind).to_str() {
        Ok(s) => s,
        Err(_) => return AncsStatus::InvalidArgument,
    };
    let params: Vec<(String, f64)> = if param_name.is_null() {
        Vec::new()
    } else {
        match CStr::from_ptr(param_name).to_str() {
            Ok(name) => vec![(name.to_string(), param_value)],
            Err(_) => return AncsStatus::InvalidArgument,
        }
    };
    guarded(|| {
        let spec = match FamilySpec::parse(kind, &params) {
            Ok(spec) => spec,
            Err(_) => return AncsStatus::InvalidArgument,
        };
        match make_family(&spec) {
            Ok(inner) => {
                ptr::write(out, Box::into_raw(Box::new(AncsFamily { inner })));
                AncsStatus::Ok
            }
            Err(_) => AncsStatus::InvalidArgument,
        }
    })
}

/// Releases a handle created by [`ancs_family_new`]. Null is ignored.
///
/// # Safety
///
/// `fam` must be null or a handle not yet freed; the handle must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ancs_family_free(fam: *mut AncsFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// Returns the family's kind name as a static NUL-terminated string, or
/// null if the handle is null.
///
/// # Safety
///
/// `fam` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ancs_family_kind(fam: *const AncsFamily) -> *const c_char {
    let Some(fam) = fam.as_ref() else {
        return ptr::null();
    };
    let name: &'static str = match fam.inner.name() {
        "gs" => "gs\0",
        "spin" => "spin\0",
        "perelomov" => "perelomov\0",
        "barut_girardello" => "barut_girardello\0",
        "hermite" => "hermite\0",
        "abel" => "abel\0",
        "sg" => "sg\0",
        "sgm" => "sgm\0",
        _ => "unknown\0",
    };
    name.as_ptr().cast()
}

/// Evaluates one scalar out of a family, with shared pointer checks and
/// panic guarding.
unsafe fn scalar(
    fam: *const AncsFamily,
    out: *mut f64,
    eval: impl FnOnce(&AnFamily) -> Result<f64, AncsStatus>,
) -> AncsStatus {
    let Some(fam) = fam.as_ref() else {
        return AncsStatus::NullArgument;
    };
    if out.is_null() {
        return AncsStatus::NullArgument;
    }
    guarded(move || match eval(&fam.inner) {
        Ok(value) => {
            ptr::write(out, value);
            AncsStatus::Ok
        }
        Err(status) => status,
    })
}

/// Writes the squared convergence radius of the family's intensity
/// domain to `*out` (infinity when the domain is the whole half-line).
///
/// # Safety
///
/// `fam` must be a live handle and `out` valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn ancs_family_radius_sq(
    fam: *const AncsFamily,
    out: *mut f64,
) -> AncsStatus {
    scalar(fam, out, |f| Ok(f.radius_sq()))
}

/// Writes the mean photon number at intensity `u` to `*out`.
///
/// # Safety
///
/// `fam` must be a live handle and `out` valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn ancs_nbar(fam: *const AncsFamily, u: f64, out: *mut f64) -> AncsStatus {
    scalar(fam, out, |f| {
        f.moments(u).map(|m| m.nbar).map_err(|e| an_status(&e))
    })
}

/// Writes the Mandel parameter at intensity `u` to `*out`.
///
/// # Safety
///
/// `fam` must be a live handle and `out` valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn ancs_mandel_q(
    fam: *const AncsFamily,
    u: f64,
    out: *mut f64,
) -> AncsStatus {
    scalar(fam, out, |f| {
        f.moments(u).map(|m| m.mandel_q).map_err(|e| an_status(&e))
    })
}

/// Writes the intensity that realizes mean photon number `nbar` to
/// `*out`. Fails with a domain error when no intensity reaches `nbar`.
///
/// # Safety
///
/// `fam` must be a live handle and `out` valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn ancs_u_of_nbar(
    fam: *const AncsFamily,
    nbar: f64,
    out: *mut f64,
) -> AncsStatus {
    scalar(fam, out, |f| f.invert_nbar(nbar).map_err(|e| an_status(&e)))
}

/// Fills `buf` with the photon-number distribution at intensity `u`,
/// detected with efficiency `eta` (pass 1 for ideal detection). The
/// probabilities start at count zero and are truncated where the summed
/// tail is negligible; `*out_len` always receives the full length, so a
/// call with `cap = 0` sizes the buffer.
///
/// # Safety
///
/// `fam` must be a live handle, `out_len` valid for writing one size,
/// and `buf` valid for writing `cap` doubles (null is allowed when `cap`
/// is 0).
#[no_mangle]
pub unsafe extern "C" fn ancs_distribution(
    fam: *const AncsFamily,
    u: f64,
    eta: f64,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> AncsStatus {
    let Some(fam) = fam.as_ref() else {
        return AncsStatus::NullArgument;
    };
    if out_len.is_null() || (buf.is_null() && cap > 0) {
        return AncsStatus::NullArgument;
    }
    guarded(|| {
        let mut dist = match fam.inner.distribution(u) {
            Ok(d) => d,
            Err(e) => return an_status(&e),
        };
        if eta != 1.0 {
            dist = match bernoulli_transform(&dist, eta) {
                Ok(d) => d,
                Err(e) => return an_status(&e),
            };
        }
        ptr::write(out_len, dist.probs.len());
        if dist.probs.len() > cap {
            return AncsStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(dist.probs.as_ptr(), buf, dist.probs.len());
        AncsStatus::Ok
    })
}

/// Evaluates the binary discrimination summary against the vacuum at
/// mean count `nbar`, vacuum prior `xi0` in (0, 1), and detection
/// efficiency `eta` in (0, 1], writing the record to `*out`.
///
/// # Safety
///
/// `fam` must be a live handle and `out` valid for writing one record.
#[no_mangle]
pub unsafe extern "C" fn ancs_helstrom(
    fam: *const AncsFamily,
    nbar: f64,
    xi0: f64,
    eta: f64,
    out: *mut AncsHelstrom,
) -> AncsStatus {
    let Some(fam) = fam.as_ref() else {
        return AncsStatus::NullArgument;
    };
    if out.is_null() {
        return AncsStatus::NullArgument;
    }
    guarded(|| match helstrom_of_nbar(&fam.inner, nbar, xi0, eta) {
        Ok(r) => {
            ptr::write(
                out,
                AncsHelstrom {
                    nbar: r.nbar,
                    eta: r.eta,
                    xi0: r.xi0,
                    overlap_sq: r.overlap_sq,
                    p_h: r.p_h,
                    delta: r.delta,
                },
            );
            AncsStatus::Ok
        }
        Err(e) => helstrom_status(&e),
    })
}

/// Finds the mean counts in `[nbar_lo, nbar_hi]` where the equal-prior
/// discrimination bound vanishes (only the oscillatory families have
/// any) and fills `buf` with them in increasing order. `*out_len` always
/// receives the full count, so a call with `cap = 0` sizes the buffer.
///
/// # Safety
///
/// `fam` must be a live handle, `out_len` valid for writing one size,
/// and `buf` valid for writing `cap` doubles (null is allowed when `cap`
/// is 0).
#[no_mangle]
pub unsafe extern "C" fn ancs_bound_zeros(
    fam: *const AncsFamily,
    nbar_lo: f64,
    nbar_hi: f64,
    buf: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> AncsStatus {
    let Some(fam) = fam.as_ref() else {
        return AncsStatus::NullArgument;
    };
    if out_len.is_null() || (buf.is_null() && cap > 0) {
        return AncsStatus::NullArgument;
    }
    guarded(|| {
        let zeros = match find_hb_zeros(&fam.inner, nbar_lo, nbar_hi) {
            Ok(z) => z,
            Err(e) => return helstrom_status(&e),
        };
        ptr::write(out_len, zeros.len());
        if zeros.len() > cap {
            return AncsStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(zeros.as_ptr(), buf, zeros.len());
        AncsStatus::Ok
    })
}
