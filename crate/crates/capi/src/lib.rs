//! C ABI over the skewpolar library.
//!
//! The surface is a single opaque context handle built from the same JSON
//! instance description the CLI consumes, plus string-in/string-out entry
//! points for mapping, lifting, and running the check suite. Every function
//! returns a status code; `0` is success, nonzero codes match the CLI exit
//! codes (`1` failed condition, `2` malformed input, `3` internal error,
//! `4` other errors such as a non-singular point). Output strings are heap
//! allocations owned by the caller and must be released with
//! [`sp_string_free`]; panics never cross the boundary.

use skewpolar::config::InstanceConfig;
use skewpolar::epimorphism::Epimorphism;
use skewpolar::geometry::{point, XVector};
use skewpolar::verify::{run_instance, RunOpts};
use skewpolar::Error;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

pub const SP_OK: c_int = 0;
pub const SP_CONDITION_FAILED: c_int = 1;
pub const SP_BAD_INPUT: c_int = 2;
pub const SP_INTERNAL: c_int = 3;
pub const SP_ERROR: c_int = 4;

/// Opaque handle: one configured instance and its residue epimorphism.
pub struct SpContext {
    cfg: InstanceConfig,
    epi: Epimorphism,
}

fn to_heap(s: &str) -> *mut c_char {
    let clean: String = s.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    CString::new(clean).expect("NUL stripped").into_raw()
}

fn store(slot: *mut *mut c_char, s: &str) {
    if !slot.is_null() {
        unsafe { *slot = to_heap(s) };
    }
}

fn code_of(e: &Error) -> c_int {
    e.exit_code() as c_int
}

/// Runs `body` behind a panic guard, routing messages into `err`.
fn guarded(err: *mut *mut c_char, body: impl FnOnce() -> Result<(), (c_int, String)>) -> c_int {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SP_OK,
        Ok(Err((code, msg))) => {
            store(err, &msg);
            code
        }
        Err(_) => {
            store(err, "internal panic");
            SP_INTERNAL
        }
    }
}

/// # Safety
///
/// `s` must be a valid NUL-terminated string or null.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (c_int, String)> {
    if s.is_null() {
        return Err((SP_BAD_INPUT, "null string argument".into()));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| (SP_BAD_INPUT, "argument is not valid UTF-8".into()))
}

/// Builds a context from a JSON instance description (the CLI config format)
/// and stores the handle in `*out`. On failure `*out` is untouched and, when
/// `err` is non-null, `*err` receives a message to free with
/// [`sp_string_free`].
///
/// # Safety
///
/// `config_json` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. The returned handle must be released with [`sp_context_free`].
#[no_mangle]
pub unsafe extern "C" fn sp_context_new(
    config_json: *const c_char,
    out: *mut *mut SpContext,
    err: *mut *mut c_char,
) -> c_int {
    guarded(err, || {
        if out.is_null() {
            return Err((SP_BAD_INPUT, "null output slot".into()));
        }
        let text = unsafe { read_str(config_json) }?;
        let cfg = InstanceConfig::from_json(text).map_err(|e| (code_of(&e), e.to_string()))?;
        let (space, subring, scale) = cfg.build(cfg.l).map_err(|e| (code_of(&e), e.to_string()))?;
        let epi = Epimorphism::new(space, subring, scale)
            .map_err(|e| (code_of(&e), e.to_string()))?;
        unsafe { *out = Box::into_raw(Box::new(SpContext { cfg, epi })) };
        Ok(())
    })
}

/// Releases a context handle. Null is a no-op.
///
/// # Safety
///
/// `ctx` must be null or a handle from [`sp_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_context_free(ctx: *mut SpContext) {
    if !ctx.is_null() {
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// Maps a source point literal such as `(0|3,1,0,0)` to its image point and
/// stores the rendered image in `*out`.
///
/// # Safety
///
/// `ctx` must be a live handle; `literal` a valid NUL-terminated string;
/// `out` a valid pointer. Free `*out` (and `*err`) with [`sp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sp_map_point(
    ctx: *const SpContext,
    literal: *const c_char,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
) -> c_int {
    guarded(err, || {
        let ctx = unsafe { ctx.as_ref() }.ok_or((SP_BAD_INPUT, "null context".into()))?;
        if out.is_null() {
            return Err((SP_BAD_INPUT, "null output slot".into()));
        }
        let literal = unsafe { read_str(literal) }?;
        let space = &ctx.epi.space;
        let x = XVector::parse(space.field(), space.dim0, space.l, literal)
            .map_err(|e| (code_of(&e), e.to_string()))?;
        let source = ctx.epi.source();
        let p = point(&source, &x).map_err(|e| (code_of(&e), e.to_string()))?;
        let image = ctx.epi.rho_point(&p).map_err(|e| (code_of(&e), e.to_string()))?;
        unsafe { *out = to_heap(&image.to_string()) };
        Ok(())
    })
}

/// Lifts a target point literal through the canonical section and stores the
/// rendered source point in `*out`.
///
/// # Safety
///
/// Same contract as [`sp_map_point`].
#[no_mangle]
pub unsafe extern "C" fn sp_lift_point(
    ctx: *const SpContext,
    literal: *const c_char,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
) -> c_int {
    guarded(err, || {
        let ctx = unsafe { ctx.as_ref() }.ok_or((SP_BAD_INPUT, "null context".into()))?;
        if out.is_null() {
            return Err((SP_BAD_INPUT, "null output slot".into()));
        }
        let literal = unsafe { read_str(literal) }?;
        let space = &ctx.epi.space;
        let x = XVector::parse(space.field(), space.dim0, space.l, literal)
            .map_err(|e| (code_of(&e), e.to_string()))?;
        ctx.epi
            .validate_target_vector(&x)
            .map_err(|e| (code_of(&e), e.to_string()))?;
        let target = ctx.epi.target();
        let p = point(&target, &x).map_err(|e| (code_of(&e), e.to_string()))?;
        let lifted = ctx.epi.lift_point(&p).map_err(|e| (code_of(&e), e.to_string()))?;
        let back = ctx.epi.rho_point(&lifted).map_err(|e| (code_of(&e), e.to_string()))?;
        if back != p {
            return Err((SP_INTERNAL, format!("lift of {p} maps onto {back} instead")));
        }
        unsafe { *out = to_heap(&lifted.to_string()) };
        Ok(())
    })
}

/// Runs the full check suite on the context's instance and stores the report
/// in `*out` as newline-delimited JSON, one record per check. `samples`
/// overrides the configured sample count when nonzero. Returns `0` when
/// every verdict matched its expectation and `1` when any diverged; other
/// codes signal that the suite could not run.
///
/// # Safety
///
/// `ctx` must be a live handle; `out` a valid pointer. Free `*out` (and
/// `*err`) with [`sp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn sp_verify(
    ctx: *const SpContext,
    samples: usize,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
) -> c_int {
    let mut mismatched = false;
    let code = guarded(err, || {
        let ctx = unsafe { ctx.as_ref() }.ok_or((SP_BAD_INPUT, "null context".into()))?;
        if out.is_null() {
            return Err((SP_BAD_INPUT, "null output slot".into()));
        }
        let mut opts = RunOpts::from_config(&ctx.cfg);
        if samples > 0 {
            opts.samples = samples;
        }
        let run = run_instance(&ctx.cfg, &opts).map_err(|e| (code_of(&e), e.to_string()))?;
        let mut report = String::new();
        for rec in &run.records {
            report.push_str(&rec.to_json_line());
            report.push('\n');
        }
        unsafe { *out = to_heap(&report) };
        mismatched = !run.ok();
        Ok(())
    });
    if code == SP_OK && mismatched {
        SP_CONDITION_FAILED
    } else {
        code
    }
}

/// Releases a string produced by this library. Null is a no-op.
///
/// # Safety
///
/// `s` must be null or a string returned through an `out`/`err` slot of this
/// library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
