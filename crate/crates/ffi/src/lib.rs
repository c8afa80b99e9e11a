//! C ABI over the gptforge toolkit.
//!
//! Systems are opaque handles created by `gf_system_*` constructors and
//! released with `gf_system_free`. Every fallible call returns a
//! [`GfStatus`]; on failure `gf_last_error` describes the problem. Strings
//! returned through out-parameters are owned by the caller and released with
//! `gf_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gptforge::classicality::{
    exists_distinguishable_pair, is_classical_theory, is_distinguishable_indices, ClassicalSet,
};
use gptforge::composition::min_tensor;
use gptforge::decoherence::mid;
use gptforge::format::{LoadedTheory, TheoryFile};
use gptforge::gpt::validate_system;
use gptforge::report;
use gptforge::zoo::{is_unrestricted, unrestricted_completion, TheoryRecipe, DEFAULT_MAX_DIM};

/// Result of a call. Verdict-returning calls report the verdict through an
/// out-parameter and return `GF_OK`.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfStatus {
    GF_OK = 0,
    /// A null pointer or an invalid index was passed.
    GF_INVALID_ARGUMENT = 1,
    /// Text could not be parsed as a recipe or theory file.
    GF_PARSE_ERROR = 2,
    /// The request is well formed but not meaningful for this system.
    GF_DOMAIN_ERROR = 3,
    /// An internal panic was caught at the boundary.
    GF_PANIC = 4,
}

/// Opaque handle to a theory.
pub struct GfSystem {
    theory: LoadedTheory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(text).expect("nul removed")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(GfStatus, String);

type Outcome = Result<(), Failure>;

fn invalid(msg: &str) -> Failure {
    Failure(GfStatus::GF_INVALID_ARGUMENT, msg.to_string())
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure(GfStatus::GF_DOMAIN_ERROR, e.to_string())
}

fn guard(f: impl FnOnce() -> Outcome) -> GfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GfStatus::GF_OK,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GfStatus::GF_PANIC
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid("null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GfStatus::GF_PARSE_ERROR, "string is not UTF-8".into()))
}

unsafe fn system<'a>(p: *const GfSystem) -> Result<&'a GfSystem, Failure> {
    p.as_ref().ok_or_else(|| invalid("null system handle"))
}

unsafe fn indices<'a>(p: *const usize, len: usize) -> Result<&'a [usize], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(invalid("null index array"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(invalid("null out-parameter"));
    }
    out.write(value);
    Ok(())
}

fn boxed(theory: LoadedTheory) -> *mut GfSystem {
    Box::into_raw(Box::new(GfSystem { theory }))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s)
        .expect("JSON has no interior nul")
        .into_raw()
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn gf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn gf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Build a system from a recipe such as `"sqbit x bit"` or `"rtrit^2"`.
///
/// # Safety
/// `recipe` must be a valid nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_system_from_recipe(
    recipe: *const c_char,
    out: *mut *mut GfSystem,
) -> GfStatus {
    guard(|| {
        let recipe: TheoryRecipe = text(recipe)?
            .parse()
            .map_err(|e: gptforge::GptError| Failure(GfStatus::GF_PARSE_ERROR, e.to_string()))?;
        let composite = recipe.build_composite(DEFAULT_MAX_DIM).map_err(domain)?;
        put(
            out,
            boxed(LoadedTheory {
                composite,
                recipe: Some(recipe),
            }),
        )
    })
}

/// Build a system from theory-file text.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_system_from_json(
    json: *const c_char,
    out: *mut *mut GfSystem,
) -> GfStatus {
    guard(|| {
        let theory = TheoryFile::parse(text(json)?, "<json>")
            .and_then(|f| f.into_theory("<json>", DEFAULT_MAX_DIM))
            .map_err(|e| Failure(GfStatus::GF_PARSE_ERROR, e.to_string()))?;
        put(out, boxed(theory))
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `sys` must come from a `gf_system_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn gf_system_free(sys: *mut GfSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Dimension of the state space; 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gf_system_dim(sys: *const GfSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.theory.system().dim())
}

/// Number of pure-state generators; 0 for a null handle.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gf_system_state_count(sys: *const GfSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.theory.system().num_states())
}

/// Canonical theory-file text for the system.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_system_to_json(
    sys: *const GfSystem,
    out: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        let s = system(sys)?;
        let file = TheoryFile::from_system(s.theory.system(), s.theory.recipe.as_ref());
        put(out, owned_string(file.to_text()))
    })
}

unsafe fn verdict(
    sys: *const GfSystem,
    out: *mut bool,
    check: impl FnOnce(&gptforge::gpt::GptSystem) -> gptforge::Result<bool>,
) -> GfStatus {
    guard(|| {
        let s = system(sys)?;
        put(out, check(s.theory.system()).map_err(domain)?)
    })
}

/// All defining invariants hold.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_validate(sys: *const GfSystem, out: *mut bool) -> GfStatus {
    verdict(sys, out, |s| Ok(validate_system(s)?.is_ok()))
}

/// The effect cone is the full dual of the state cone.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_is_unrestricted(sys: *const GfSystem, out: *mut bool) -> GfStatus {
    verdict(sys, out, is_unrestricted)
}

/// All pure states are jointly distinguishable.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_is_classical_theory(sys: *const GfSystem, out: *mut bool) -> GfStatus {
    verdict(sys, out, is_classical_theory)
}

/// Some pair of pure states is distinguishable.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_exists_distinguishable_pair(
    sys: *const GfSystem,
    out: *mut bool,
) -> GfStatus {
    verdict(sys, out, exists_distinguishable_pair)
}

/// Whether the listed pure states (at least two) are distinguishable. When
/// they are and `measurement_json` is not null, it receives the effects as a
/// JSON array of rational-string vectors; otherwise it is set to null.
///
/// # Safety
/// `sys` must be a live handle, `states` must point to `len` indices, `out`
/// must be writable and `measurement_json` null or writable.
#[no_mangle]
pub unsafe extern "C" fn gf_distinguish(
    sys: *const GfSystem,
    states: *const usize,
    len: usize,
    out: *mut bool,
    measurement_json: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        let s = system(sys)?;
        let idx = indices(states, len)?;
        let found = is_distinguishable_indices(s.theory.system(), idx).map_err(domain)?;
        if !measurement_json.is_null() {
            let text = found
                .as_ref()
                .map(|m| owned_string(report::measurement(m).to_string()));
            measurement_json.write(text.unwrap_or(ptr::null_mut()));
        }
        put(out, found.is_some())
    })
}

/// The no-restriction completion as a new handle.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_complete(sys: *const GfSystem, out: *mut *mut GfSystem) -> GfStatus {
    guard(|| {
        let s = system(sys)?;
        let done = unrestricted_completion(s.theory.system()).map_err(domain)?;
        put(
            out,
            boxed(LoadedTheory {
                composite: gptforge::composition::CompositeSystem::single(done),
                recipe: None,
            }),
        )
    })
}

/// Minimal tensor product `a (x) b` as a new handle.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_compose(
    a: *const GfSystem,
    b: *const GfSystem,
    out: *mut *mut GfSystem,
) -> GfStatus {
    guard(|| {
        let (a, b) = (system(a)?, system(b)?);
        let theory = match (&a.theory.recipe, &b.theory.recipe) {
            (Some(ra), Some(rb)) => {
                let mut parts = ra.factors();
                parts.extend(rb.factors());
                let recipe = TheoryRecipe::Composite(parts);
                let composite = recipe.build_composite(DEFAULT_MAX_DIM).map_err(domain)?;
                LoadedTheory {
                    composite,
                    recipe: Some(recipe),
                }
            }
            _ => {
                let dim = a.theory.system().dim() * b.theory.system().dim();
                if dim > DEFAULT_MAX_DIM {
                    return Err(domain(gptforge::GptError::DimensionLimit {
                        dim,
                        limit: DEFAULT_MAX_DIM,
                    }));
                }
                LoadedTheory {
                    composite: min_tensor(a.theory.system(), b.theory.system()),
                    recipe: None,
                }
            }
        };
        put(out, boxed(theory))
    })
}

/// The decoherence matrix of a maximal classical set of pure states, as a
/// JSON array of rows. Returns `GF_DOMAIN_ERROR` when the states are not a
/// maximal classical set.
///
/// # Safety
/// `sys` must be a live handle, `states` must point to `len` indices and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_mid(
    sys: *const GfSystem,
    states: *const usize,
    len: usize,
    out: *mut *mut c_char,
) -> GfStatus {
    guard(|| {
        let s = system(sys)?;
        let idx = indices(states, len)?;
        let sys = s.theory.system();
        if let Some(&bad) = idx.iter().find(|&&i| i >= sys.num_states()) {
            return Err(invalid(&format!("state index {bad} out of range")));
        }
        let cs = ClassicalSet::from_indices(sys, idx)
            .map_err(domain)?
            .ok_or_else(|| domain("states are not distinguishable"))?;
        let channel = mid(sys, &cs).map_err(domain)?;
        put(out, owned_string(report::channel(&channel).to_string()))
    })
}
