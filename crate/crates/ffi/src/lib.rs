//! C ABI for swanson-core.
//!
//! Every function returns a [`SwansonStatus`]; on failure the message is
//! retrievable with [`swanson_last_error`] on the same thread. Profiles are
//! opaque handles released with [`swanson_profile_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use swanson_core::closedform::{harmonic_spectrum, SolitonicClosedForm};
use swanson_core::discrete::{self, Grid};
use swanson_core::model;
use swanson_core::profiles::{self, Amplitude, ExprJet};
use swanson_core::spectra::{self, QrOptions, SymmetricTridiagonal};
use swanson_core::{Error, ModelParams, Profile};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwansonStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numeric = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque ladder-operator profile.
pub struct SwansonProfile(Profile);

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SwansonParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SwansonGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

/// Pointwise coefficients at one `x`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SwansonCoefficients {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub veff: f64,
    pub rho_tilde: f64,
    pub zeta_plus: f64,
    pub commutator: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<Vec<u8>>) {
    let text = CString::new(message).unwrap_or_else(|_| CString::from(c"error message contained NUL"));
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Core(Error),
    BufferTooSmall(usize, usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SwansonStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SwansonStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("`{name}` is null"));
            SwansonStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(msg);
            SwansonStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            if e.is_numeric() {
                SwansonStatus::Numeric
            } else {
                SwansonStatus::InvalidArgument
            }
        }
        Ok(Err(Failure::BufferTooSmall(need, have))) => {
            set_error(format!("buffer holds {have} values, {need} required"));
            SwansonStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic");
            SwansonStatus::Panic
        }
    }
}

unsafe fn profile_ref<'a>(p: *const SwansonProfile) -> Result<&'a Profile, Failure> {
    p.as_ref().map(|p| &p.0).ok_or(Failure::Null("profile"))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn c_str<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Invalid(format!("`{name}` is not UTF-8")))
}

fn params(p: SwansonParams) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(p.omega, p.alpha, p.beta)?)
}

fn grid(g: SwansonGrid) -> Result<Grid, Failure> {
    Ok(Grid::new(g.x_min, g.x_max, g.n)?)
}

unsafe fn emit(out: *mut *mut SwansonProfile, make: impl FnOnce() -> Result<Profile, Failure>) -> SwansonStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = ptr::null_mut();
        *slot = Box::into_raw(Box::new(SwansonProfile(make()?)));
        Ok(())
    })
}

/// Harmonic profile `a = 1/√2`, `b = x/√2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_profile_harmonic(out: *mut *mut SwansonProfile) -> SwansonStatus {
    emit(out, || Ok(profiles::make_harmonic()))
}

/// Solitonic profile `a = cosh qx`, `b = κ q sinh qx`; requires `q > 0` (closed forms need `κ > ½`).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_profile_solitonic(q: f64, kappa: f64, out: *mut *mut SwansonProfile) -> SwansonStatus {
    emit(out, || Ok(profiles::make_solitonic(q, kappa)?))
}

/// Morse-like profile `a = e^(px)` with the canonical `b` and shift `μ`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_profile_morse(p: f64, mu: f64, out: *mut *mut SwansonProfile) -> SwansonStatus {
    emit(out, || Ok(profiles::make_morse(p, mu)?))
}

/// Canonical profile: `a` from an expression, `b` restoring `[η, η†] = 1`.
///
/// # Safety
/// `expr_a` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_profile_canonical(
    expr_a: *const c_char,
    mu: f64,
    out: *mut *mut SwansonProfile,
) -> SwansonStatus {
    emit(out, || {
        let jet = ExprJet::parse(c_str(expr_a, "expr_a")?)?;
        Ok(profiles::canonical_from_amplitude(Amplitude::Expr(Box::new(jet)), mu)?)
    })
}

/// Custom profile from two expressions in `x`.
///
/// # Safety
/// `expr_a` and `expr_b` must be NUL-terminated strings; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_profile_custom(
    expr_a: *const c_char,
    expr_b: *const c_char,
    out: *mut *mut SwansonProfile,
) -> SwansonStatus {
    emit(out, || Ok(profiles::make_custom(c_str(expr_a, "expr_a")?, c_str(expr_b, "expr_b")?)?))
}

/// Releases a profile; null is ignored.
///
/// # Safety
/// `profile` must come from a `swanson_profile_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn swanson_profile_free(profile: *mut SwansonProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Coefficients, effective potential and metric at `x`.
///
/// # Safety
/// `profile` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_coefficients(
    profile: *const SwansonProfile,
    p: SwansonParams,
    x: f64,
    out: *mut SwansonCoefficients,
) -> SwansonStatus {
    guard(|| {
        let profile = profile_ref(profile)?;
        let out = out_ref(out, "out")?;
        let params = params(p)?;
        profile.check_point(x)?;
        let rho = model::rho_tilde(profile, &params, x)?;
        *out = SwansonCoefficients {
            a: profile.a(x),
            b: profile.b(x),
            c1: model::c1(profile, &params, x),
            c2: model::c2(profile, &params, x),
            veff: model::v_eff(profile, &params, x),
            rho_tilde: rho,
            zeta_plus: model::zeta_plus(profile, &params, x)?,
            commutator: profile.commutator_field(x),
        };
        Ok(())
    })
}

/// Lowest `k` eigenvalues of the discretized Hermitian equivalent, ascending.
///
/// # Safety
/// `profile` must be a live handle; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn swanson_lowest_eigenvalues(
    profile: *const SwansonProfile,
    p: SwansonParams,
    g: SwansonGrid,
    k: usize,
    out: *mut f64,
    capacity: usize,
) -> SwansonStatus {
    guard(|| {
        let profile = profile_ref(profile)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if capacity < k {
            return Err(Failure::BufferTooSmall(k, capacity));
        }
        let (params, grid) = (params(p)?, grid(g)?);
        let small = discrete::build_h_tilde(profile, &params, &grid)?;
        let values = spectra::lowest_eigenvalues(&SymmetricTridiagonal::from_band(&small.matrix)?, k)?;
        std::slice::from_raw_parts_mut(out, k).copy_from_slice(&values);
        Ok(())
    })
}

/// Dense nonsymmetric solve of the discretized non-Hermitian operator:
/// `max |Im E|` and `‖H̃‖_∞`. The grid is limited to 400 nodes.
///
/// # Safety
/// `profile` must be a live handle; `max_imag` and `norm_inf` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_oracle_max_imag(
    profile: *const SwansonProfile,
    p: SwansonParams,
    g: SwansonGrid,
    max_imag: *mut f64,
    norm_inf: *mut f64,
) -> SwansonStatus {
    guard(|| {
        let profile = profile_ref(profile)?;
        let max_imag = out_ref(max_imag, "max_imag")?;
        let norm_inf = out_ref(norm_inf, "norm_inf")?;
        let (params, grid) = (params(p)?, grid(g)?);
        let big = discrete::build_non_hermitian(profile, &params, &grid)?;
        let eig = spectra::eig_band_nonsymmetric(&big.matrix, &QrOptions::default())?;
        *max_imag = spectra::max_imaginary(&eig);
        *norm_inf = big.matrix.norm_inf();
        Ok(())
    })
}

/// Closed-form level `n` of the solitonic family.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_solitonic_energy(
    q: f64,
    kappa: f64,
    p: SwansonParams,
    n: usize,
    out: *mut f64,
) -> SwansonStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = SolitonicClosedForm::for_params(q, kappa, &params(p)?)?.energy(n);
        Ok(())
    })
}

/// Closed-form level `n` of the harmonic family, `(n + ½)√(ω² − 4αβ)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn swanson_harmonic_energy(p: SwansonParams, n: usize, out: *mut f64) -> SwansonStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = harmonic_spectrum(&params(p)?, n)?;
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, 0 when there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null with `len = 0`.
#[no_mangle]
pub unsafe extern "C" fn swanson_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}
