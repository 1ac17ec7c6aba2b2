//! C interface to `gefp-lab`.
//!
//! A [`GefpModel`] holds one homogeneous parameter point, either an exact
//! rational `(Δ, t)` pair or a float `(λ, η)` / `(Δ, t)` pair. Every call
//! returns a [`GefpStatus`]; on failure [`gefp_last_error`] describes it.
//! Values come back as newly allocated strings (`"p/q"` for exact results,
//! decimal otherwise) to be released with [`gefp_string_free`].

use std::cell::RefCell;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gefp_lab::error::Error;
use gefp_lab::gefp::{gefp_homogeneous, HomParams, ResidueEngine};
use gefp_lab::hfun::HTable;
use gefp_lab::oracle::{partition_function_oracle, reduced_partition_function, WeightGrid, YoungProfile};
use gefp_lab::params::{trig_from_delta_t, weights_from_trig, AnisotropyPoint};
use gefp_lab::report::Engine;
use gefp_lab::scalar::{parse_rational, BigFloat, Scalar};
use rug::Rational;

/// Result of every call; zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GefpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidProfile = 4,
    NonphysicalWeights = 5,
    Unsupported = 6,
    TooLarge = 7,
    BadIndex = 8,
    DivisionByZero = 9,
    DuplicateRapidity = 10,
    SingularHankel = 11,
    NotInvertible = 12,
    NotDivisible = 13,
    BranchPole = 14,
    Inconsistent = 15,
    Panic = 16,
}

impl From<&Error> for GefpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DivisionByZero(_) => GefpStatus::DivisionByZero,
            Error::NonphysicalWeights(_) => GefpStatus::NonphysicalWeights,
            Error::TooLarge { .. } => GefpStatus::TooLarge,
            Error::BadIndex(_) => GefpStatus::BadIndex,
            Error::DuplicateRapidity(..) => GefpStatus::DuplicateRapidity,
            Error::SingularHankel(_) => GefpStatus::SingularHankel,
            Error::NotInvertible => GefpStatus::NotInvertible,
            Error::NotDivisible => GefpStatus::NotDivisible,
            Error::Unsupported(_) => GefpStatus::Unsupported,
            Error::BranchPole => GefpStatus::BranchPole,
            Error::InvalidProfile(_) => GefpStatus::InvalidProfile,
            Error::Inconsistent(_) => GefpStatus::Inconsistent,
            Error::Parse { .. } => GefpStatus::Parse,
        }
    }
}

/// Opaque parameter point plus cached residue engines.
pub struct GefpModel {
    inner: Inner,
}

enum Inner {
    Exact {
        point: AnisotropyPoint<Rational>,
        engines: BTreeMap<usize, ResidueEngine<Rational>>,
    },
    Float(HomParams<BigFloat>),
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(GefpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail((&e).into(), format!("{}: {e}", e.name()))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GefpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GefpStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GefpStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(GefpStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GefpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn not_null<T>(p: *const T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(GefpStatus::NullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

unsafe fn write_value(value: String, approx: f64, out: *mut *mut c_char, out_approx: *mut c_double) {
    *out = CString::new(value).expect("numbers have no nul").into_raw();
    if !out_approx.is_null() {
        *out_approx = approx;
    }
}

/// Exact model at rational `(Δ, t)`, e.g. `"1/2"`, `"1"`.
///
/// # Safety
/// `delta` and `t` must be nul-terminated strings, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gefp_model_new_exact(
    delta: *const c_char,
    t: *const c_char,
    allow_nonphysical: bool,
    out: *mut *mut GefpModel,
) -> GefpStatus {
    guard(|| {
        not_null(out, "out")?;
        let delta = parse_rational(text(delta, "delta")?)?;
        let t = parse_rational(text(t, "t")?)?;
        let point = AnisotropyPoint::new(delta, t, allow_nonphysical)?;
        *out = Box::into_raw(Box::new(GefpModel {
            inner: Inner::Exact {
                point,
                engines: BTreeMap::new(),
            },
        }));
        Ok(())
    })
}

/// Float model at `(Δ, t)` (`trig == false`) or `(λ, η)` (`trig == true`).
/// Decimal or `"p/q"` input, `precision` bits.
///
/// # Safety
/// `x` and `y` must be nul-terminated strings, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gefp_model_new_float(
    x: *const c_char,
    y: *const c_char,
    trig: bool,
    precision: u32,
    allow_nonphysical: bool,
    out: *mut *mut GefpModel,
) -> GefpStatus {
    guard(|| {
        not_null(out, "out")?;
        if !(8..=1 << 16).contains(&precision) {
            return Err(Fail(
                GefpStatus::BadIndex,
                format!("precision {precision} is outside 8..=65536"),
            ));
        }
        let x = BigFloat::parse(precision, text(x, "x")?)?;
        let y = BigFloat::parse(precision, text(y, "y")?)?;
        let params = if trig {
            weights_from_trig(&x, &BigFloat::zero(), &y, allow_nonphysical)?;
            HomParams::Trig { lambda: x, eta: y }
        } else {
            HomParams::DeltaT(AnisotropyPoint::new(x, y, allow_nonphysical)?)
        };
        *out = Box::into_raw(Box::new(GefpModel {
            inner: Inner::Float(params),
        }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from a `gefp_model_new_*` call and not be used again.
#[no_mangle]
pub unsafe extern "C" fn gefp_model_free(model: *mut GefpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn profile_from(n: usize, r: *const usize, s: usize) -> Result<YoungProfile, Fail> {
    let entries = if s == 0 {
        Vec::new()
    } else {
        not_null(r, "r")?;
        std::slice::from_raw_parts(r, s).to_vec()
    };
    Ok(YoungProfile::new(n, entries)?)
}

unsafe fn engine_from(name: *const c_char) -> Result<Option<Engine>, Fail> {
    if name.is_null() {
        return Ok(None);
    }
    let name = text(name, "engine")?;
    Engine::parse(name)
        .map(Some)
        .ok_or_else(|| Fail(GefpStatus::Unsupported, format!("unknown engine {name:?}")))
}

/// GEFP of the profile `r[0..s]` on the `n×n` lattice. `engine` may be NULL
/// (residue); exact models accept `"residue"` and `"oracle"`, float models
/// also `"jets"` and `"homlim"` (a float `(Δ, t)` point needs `|Δ| < 1` for
/// these). `out_approx` may be NULL.
///
/// # Safety
/// `model` must be live, `r` must point to `s` values (or be NULL when
/// `s == 0`), `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gefp_model_gefp(
    model: *mut GefpModel,
    n: usize,
    r: *const usize,
    s: usize,
    engine: *const c_char,
    out: *mut *mut c_char,
    out_approx: *mut c_double,
) -> GefpStatus {
    guard(|| {
        not_null(model, "model")?;
        not_null(out, "out")?;
        let profile = profile_from(n, r, s)?;
        let engine = engine_from(engine)?.unwrap_or(Engine::Residue);
        match &mut (*model).inner {
            Inner::Exact { point, engines } => {
                let value = match engine {
                    Engine::Residue => {
                        let engine = match engines.entry(n) {
                            Entry::Occupied(e) => e.into_mut(),
                            Entry::Vacant(e) => e.insert(ResidueEngine::from_oracle(n, point.clone())?),
                        };
                        engine.gefp(&profile)?
                    }
                    _ => {
                        gefp_homogeneous(&profile, &HomParams::DeltaT(point.clone()), engine, true)?
                            .value
                    }
                };
                write_value(value.to_report_string(), value.to_f64(), out, out_approx);
            }
            Inner::Float(params) => {
                let converted = match (engine, &*params) {
                    (Engine::Jets | Engine::Homlim, HomParams::DeltaT(p)) => {
                        let (lambda, eta) = trig_from_delta_t(p)?;
                        Some(HomParams::Trig { lambda, eta })
                    }
                    _ => None,
                };
                let rec = gefp_homogeneous(&profile, converted.as_ref().unwrap_or(params), engine, true)?;
                write_value(rec.value.to_report_string(), rec.value.to_f64(), out, out_approx);
            }
        }
        Ok(())
    })
}

/// `Z_N` by transfer matrix, or `Z_N / c^N` when `reduced`. Exact `(Δ, t)`
/// models are normalised to `a = 1` and know only `c²`, so odd `n` needs
/// `reduced`.
///
/// # Safety
/// `model` must be live, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gefp_model_partition(
    model: *mut GefpModel,
    n: usize,
    reduced: bool,
    out: *mut *mut c_char,
    out_approx: *mut c_double,
) -> GefpStatus {
    guard(|| {
        not_null(model, "model")?;
        not_null(out, "out")?;
        fn z<S: Scalar>(grid: &WeightGrid<S>, reduced: bool) -> Result<S, Error> {
            if reduced {
                reduced_partition_function(grid)
            } else {
                partition_function_oracle(grid)
            }
        }
        let (value, approx) = match &(*model).inner {
            Inner::Exact { point, .. } => {
                let v = z(&WeightGrid::from_anisotropy(n, point), reduced)?;
                (v.to_report_string(), v.to_f64())
            }
            Inner::Float(HomParams::DeltaT(p)) => {
                let v = z(&WeightGrid::from_anisotropy(n, p), reduced)?;
                (v.to_report_string(), v.to_f64())
            }
            Inner::Float(HomParams::Trig { lambda, eta }) => {
                let w = weights_from_trig(lambda, &BigFloat::zero(), eta, true)?;
                let v = z(&WeightGrid::homogeneous(n, &w), reduced)?;
                (v.to_report_string(), v.to_f64())
            }
        };
        write_value(value, approx, out, out_approx);
        Ok(())
    })
}

/// `H_N^(r)`, the probability that the single c-vertex of the first row
/// sits in column `r` (from the right).
///
/// # Safety
/// `model` must be live, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gefp_model_boundary_h(
    model: *mut GefpModel,
    n: usize,
    r: usize,
    out: *mut *mut c_char,
    out_approx: *mut c_double,
) -> GefpStatus {
    guard(|| {
        not_null(model, "model")?;
        not_null(out, "out")?;
        let (value, approx) = match &(*model).inner {
            Inner::Exact { point, .. } => {
                let t = HTable::from_oracle(&WeightGrid::from_anisotropy(n, point))?;
                let v = t.get(r)?;
                (v.to_report_string(), v.to_f64())
            }
            Inner::Float(HomParams::DeltaT(p)) => {
                let t = HTable::from_oracle(&WeightGrid::from_anisotropy(n, p))?;
                let v = t.get(r)?;
                (v.to_report_string(), v.to_f64())
            }
            Inner::Float(HomParams::Trig { lambda, eta }) => {
                let t = HTable::via_k(n, lambda, eta)?;
                let v = t.get(r)?;
                (v.to_report_string(), v.to_f64())
            }
        };
        write_value(value, approx, out, out_approx);
        Ok(())
    })
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn gefp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn gefp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn gefp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
