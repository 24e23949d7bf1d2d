//! C ABI over `qei-core`.
//!
//! Every entry point returns a [`QeiStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be copied out with
//! [`qei_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use qei_core::causal::{classify_covector, classify_vector, CovectorClass, VectorClass};
use qei_core::fresnel::{fresnel_eval, FresnelContext};
use qei_core::negative_energy::{rho_origin, FieldMethod, WavePacketSpec};
use qei_core::observer_norm::{aleph_uc, NormMode};
use qei_core::qei::{c_coefficient, qei_bound, Normalization, SmearingFunction};
use qei_core::tensor::{Covec4, Vec4};
use qei_core::{energy, QeiError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QeiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Degenerate = 3,
    NotSubluminal = 4,
    NotConverged = 5,
    NotPositive = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QeiVectorClass {
    SubluminalFuture = 0,
    SubluminalPast = 1,
    InterluminalFuture = 2,
    InterluminalPast = 3,
    SlowNull = 4,
    FastNull = 5,
    Superluminal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QeiCovectorClass {
    HyperbolicFuture = 0,
    HyperbolicPast = 1,
    OrdinaryNull = 2,
    ExtraordinaryNull = 3,
    DoublyNull = 4,
    Interstitial = 5,
    Spacelike = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QeiNormKind {
    /// ℵ = 1
    Sr = 0,
    /// ℵ = ℵ_UC
    Uc = 1,
    /// ℵ supplied by the caller
    Explicit = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QeiBound {
    pub c: f64,
    pub aleph: f64,
    pub gpp_norm_sq: f64,
    pub bound: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QeiSwec {
    pub holds: bool,
    pub boundary: bool,
    pub min_eig_x1: f64,
    pub min_eig_x2: f64,
}

/// Uniaxial crystal with parameter ξ.
pub struct QeiMedium {
    xi: f64,
    ctx: FresnelContext,
}

/// Inertial worldline `(cosh α, sinh α cos β, 0, sinh α sin β)` in a medium.
pub struct QeiObserver {
    xi: f64,
    alpha: f64,
    beta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &QeiError) -> QeiStatus {
    match e {
        QeiError::InvalidInput(_) => QeiStatus::InvalidInput,
        QeiError::NotSubluminal { .. } => QeiStatus::NotSubluminal,
        QeiError::NotPositive { .. } => QeiStatus::NotPositive,
        QeiError::NewtonDiverged { .. } | QeiError::NonConvergent { .. } | QeiError::GridTooCoarse(_) => {
            QeiStatus::NotConverged
        }
        _ => QeiStatus::Degenerate,
    }
}

struct Fail(QeiStatus, String);

impl From<QeiError> for Fail {
    fn from(e: QeiError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QeiStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QeiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            QeiStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            QeiStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn read4(p: *const f64, what: &str) -> Result<[f64; 4], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let mut a = [0.0; 4];
    a.copy_from_slice(std::slice::from_raw_parts(p, 4));
    Ok(a)
}

/// Copies the calling thread's last error message (NUL-terminated, possibly
/// truncated) into `buf`. Returns the buffer size needed for the full message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qei_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn qei_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `out` must be a valid pointer; release the handle with [`qei_medium_free`].
#[no_mangle]
pub unsafe extern "C" fn qei_medium_new(xi: f64, out: *mut *mut QeiMedium) -> QeiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let ctx = FresnelContext::uniaxial(xi)?;
        out.write(Box::into_raw(Box::new(QeiMedium { xi, ctx })));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`qei_medium_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qei_medium_free(m: *mut QeiMedium) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live medium handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_medium_xi(m: *const QeiMedium, out: *mut f64) -> QeiStatus {
    guard(|| write(out, deref(m, "medium")?.xi, "out"))
}

/// Creates an observer in medium `m`; fails with `NotSubluminal` off the
/// subluminal set.
///
/// # Safety
/// `m` must be a live medium handle and `out` a valid pointer; release the
/// handle with [`qei_observer_free`].
#[no_mangle]
pub unsafe extern "C" fn qei_observer_new(
    m: *const QeiMedium,
    alpha: f64,
    beta: f64,
    out: *mut *mut QeiObserver,
) -> QeiStatus {
    guard(|| {
        let m = deref(m, "medium")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(QeiError::InvalidInput("alpha and beta must be finite".into()).into());
        }
        qei_core::causal::require_subluminal(m.xi, alpha, beta)?;
        out.write(Box::into_raw(Box::new(QeiObserver { xi: m.xi, alpha, beta })));
        Ok(())
    })
}

/// # Safety
/// `o` must be null or a handle from [`qei_observer_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qei_observer_free(o: *mut QeiObserver) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Evaluates the Fresnel polynomial at covector `k[4]`.
///
/// # Safety
/// `m` must be a live handle, `k` valid for 4 reads, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_fresnel(m: *const QeiMedium, k: *const f64, out: *mut f64) -> QeiStatus {
    guard(|| {
        let m = deref(m, "medium")?;
        let k = read4(k, "k")?;
        write(out, fresnel_eval(&m.ctx, &Covec4(k)), "out")
    })
}

/// # Safety
/// `m` must be a live handle, `z` valid for 4 reads, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_classify_vector(
    m: *const QeiMedium,
    z: *const f64,
    tol: f64,
    out: *mut QeiVectorClass,
) -> QeiStatus {
    guard(|| {
        let m = deref(m, "medium")?;
        let z = read4(z, "z")?;
        let c = match classify_vector(&m.ctx, &Vec4(z), tol)? {
            VectorClass::SubluminalFuture => QeiVectorClass::SubluminalFuture,
            VectorClass::SubluminalPast => QeiVectorClass::SubluminalPast,
            VectorClass::InterluminalFuture => QeiVectorClass::InterluminalFuture,
            VectorClass::InterluminalPast => QeiVectorClass::InterluminalPast,
            VectorClass::SlowNull => QeiVectorClass::SlowNull,
            VectorClass::FastNull => QeiVectorClass::FastNull,
            VectorClass::Superluminal => QeiVectorClass::Superluminal,
        };
        write(out, c, "out")
    })
}

/// # Safety
/// `m` must be a live handle, `k` valid for 4 reads, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_classify_covector(
    m: *const QeiMedium,
    k: *const f64,
    tol: f64,
    out: *mut QeiCovectorClass,
) -> QeiStatus {
    guard(|| {
        let m = deref(m, "medium")?;
        let k = read4(k, "k")?;
        let c = match classify_covector(&m.ctx, &Covec4(k), tol)? {
            CovectorClass::HyperbolicFuture => QeiCovectorClass::HyperbolicFuture,
            CovectorClass::HyperbolicPast => QeiCovectorClass::HyperbolicPast,
            CovectorClass::OrdinaryNull => QeiCovectorClass::OrdinaryNull,
            CovectorClass::ExtraordinaryNull => QeiCovectorClass::ExtraordinaryNull,
            CovectorClass::DoublyNull => QeiCovectorClass::DoublyNull,
            CovectorClass::Interstitial => QeiCovectorClass::Interstitial,
            CovectorClass::Spacelike => QeiCovectorClass::Spacelike,
        };
        write(out, c, "out")
    })
}

/// Energy-condition verdict along the observer's worldline.
///
/// # Safety
/// `o` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_swec(o: *const QeiObserver, out: *mut QeiSwec) -> QeiStatus {
    guard(|| {
        let o = deref(o, "observer")?;
        let r = energy::swec_check(o.xi, o.alpha, o.beta, None)?;
        let v = QeiSwec {
            holds: r.holds,
            boundary: r.boundary,
            min_eig_x1: r.eigenvalues_x1[0],
            min_eig_x2: r.eigenvalues_x2[0],
        };
        write(out, v, "out")
    })
}

/// # Safety
/// `o` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_c_coefficient(o: *const QeiObserver, out: *mut f64) -> QeiStatus {
    guard(|| {
        let o = deref(o, "observer")?;
        write(out, c_coefficient(o.xi, o.alpha, o.beta)?, "out")
    })
}

/// ℵ_UC by Newton inversion (`series == false`) or the small-ξ series.
///
/// # Safety
/// `o` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_aleph_uc(o: *const QeiObserver, series: bool, out: *mut f64) -> QeiStatus {
    guard(|| {
        let o = deref(o, "observer")?;
        let mode = if series { NormMode::Series } else { NormMode::Numeric };
        write(out, aleph_uc(o.xi, o.alpha, o.beta, mode)?.aleph, "out")
    })
}

fn normalization(kind: QeiNormKind, aleph: f64) -> Normalization {
    match kind {
        QeiNormKind::Sr => Normalization::Sr,
        QeiNormKind::Uc => Normalization::Uc,
        QeiNormKind::Explicit => Normalization::Explicit(aleph),
    }
}

unsafe fn bound_with(
    o: *const QeiObserver,
    kind: QeiNormKind,
    aleph: f64,
    g: Result<SmearingFunction, Fail>,
    out: *mut QeiBound,
) -> Result<(), Fail> {
    let o = deref(o, "observer")?;
    let r = qei_bound(o.xi, o.alpha, o.beta, normalization(kind, aleph), &g?)?;
    write(out, QeiBound { c: r.c, aleph: r.aleph, gpp_norm_sq: r.gpp_norm_sq, bound: r.bound }, "out")
}

/// QEI bound for the Gaussian `g(τ) = exp(−τ²/(2σ²))`. `aleph` is read only
/// for `QeiNormKind::Explicit`.
///
/// # Safety
/// `o` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_bound_gaussian(
    o: *const QeiObserver,
    kind: QeiNormKind,
    aleph: f64,
    sigma: f64,
    out: *mut QeiBound,
) -> QeiStatus {
    guard(|| bound_with(o, kind, aleph, SmearingFunction::gaussian(sigma).map_err(Fail::from), out))
}

/// QEI bound for `g` sampled on the uniform grid `t0 + j·h`, `j < len`.
///
/// # Safety
/// `o` must be a live handle, `samples` valid for `len` reads, `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_bound_sampled(
    o: *const QeiObserver,
    kind: QeiNormKind,
    aleph: f64,
    h: f64,
    t0: f64,
    samples: *const f64,
    len: usize,
    out: *mut QeiBound,
) -> QeiStatus {
    guard(|| {
        if samples.is_null() {
            return Err(null("samples"));
        }
        let s = std::slice::from_raw_parts(samples, len).to_vec();
        bound_with(o, kind, aleph, SmearingFunction::sampled(h, t0, s).map_err(Fail::from), out)
    })
}

/// Classical energy density at the origin for the single-mode wave packet of
/// width `tau0` moving along the observer's worldline (closed form).
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qei_rho_origin(
    m: *const QeiMedium,
    tau0: f64,
    alpha: f64,
    beta: f64,
    out: *mut f64,
) -> QeiStatus {
    guard(|| {
        let m = deref(m, "medium")?;
        let spec = WavePacketSpec::new(tau0, alpha, beta, m.xi)?;
        write(out, rho_origin(&spec, FieldMethod::ClosedForm)?, "out")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panic_is_contained() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, QeiStatus::Panic);
        let mut buf = [0 as c_char; 64];
        let n = unsafe { qei_last_error(buf.as_mut_ptr(), buf.len()) };
        let msg = unsafe { std::ffi::CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
        assert_eq!(msg, "internal panic: boom");
        assert_eq!(n, msg.len() + 1);
    }

    #[test]
    fn error_mapping() {
        assert_eq!(status_of(&QeiError::InvalidInput("x".into())), QeiStatus::InvalidInput);
        assert_eq!(status_of(&QeiError::NonConvergent { change: 1.0 }), QeiStatus::NotConverged);
        assert_eq!(status_of(&QeiError::ZeroMomentum), QeiStatus::Degenerate);
    }
}
