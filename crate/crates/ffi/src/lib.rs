//! C ABI for the decaypath library.
//!
//! Networks and path tables are opaque handles created by `dp_*_build` /
//! `dp_network_from_json` and released with the matching `*_free`. Every
//! fallible call returns a [`DpStatus`]; on failure a description is
//! available from [`dp_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use decaypath::cone::PlusVector;
use decaypath::error::Error;
use decaypath::io::parse_network;
use decaypath::network::{validate_network, NetworkSpec};
use decaypath::operators::{eval_gamma, eval_gamma_hat, eval_gamma_r};
use decaypath::path::{build_path_table, compute_sigma_star, PathMode, PathTable};
use decaypath::stability::{check_sgc_sample, spectral_radius, IterOptions, Verdict, Witness};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Dimension = 5,
    Domain = 6,
    WrongClass = 7,
    NonConvergence = 8,
    Overflow = 9,
    Construction = 10,
    IndexOutOfRange = 11,
    Internal = 12,
}

/// Validated network specification.
pub struct DpNetwork {
    spec: NetworkSpec,
}

/// Path table `σ` on a grid that starts at 0.
pub struct DpPathTable {
    table: PathTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DpStatus {
    match e {
        Error::Structural { .. } | Error::Parse(_) | Error::InvalidFunction(_) | Error::Io(_) => DpStatus::Parse,
        Error::Validation(_) => DpStatus::Validation,
        Error::Dimension { .. } => DpStatus::Dimension,
        Error::Domain(_) | Error::Scaling { .. } | Error::Size(_) | Error::Assembly(_) => DpStatus::Domain,
        Error::WrongClass(_) => DpStatus::WrongClass,
        Error::NonConvergence { .. } => DpStatus::NonConvergence,
        Error::Overflow { .. } => DpStatus::Overflow,
        Error::Construction { .. } => DpStatus::Construction,
        Error::IndexOutOfRange { .. } => DpStatus::IndexOutOfRange,
    }
}

fn fail(status: DpStatus, msg: impl Into<String>) -> DpStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, recording errors and converting panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), DpStatus>) -> DpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DpStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(DpStatus::Internal, "panic inside decaypath"),
    }
}

fn lib(e: Error) -> DpStatus {
    fail(status_of(&e), e.to_string())
}

fn null(what: &str) -> DpStatus {
    fail(DpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn network<'a>(p: *const DpNetwork) -> Result<&'a DpNetwork, DpStatus> {
    p.as_ref().ok_or_else(|| null("network"))
}

unsafe fn table<'a>(p: *const DpPathTable) -> Result<&'a DpPathTable, DpStatus> {
    p.as_ref().ok_or_else(|| null("path table"))
}

unsafe fn input(s: *const f64, len: usize, n: usize) -> Result<PlusVector, DpStatus> {
    if s.is_null() {
        return Err(null("input vector"));
    }
    if len != n {
        return Err(lib(Error::Dimension { expected: n, got: len }));
    }
    PlusVector::new(std::slice::from_raw_parts(s, len).to_vec()).map_err(lib)
}

unsafe fn output<'a>(out: *mut f64, len: usize, n: usize) -> Result<&'a mut [f64], DpStatus> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < n {
        return Err(lib(Error::Dimension { expected: n, got: len }));
    }
    Ok(std::slice::from_raw_parts_mut(out, n))
}

fn opts(tol: f64, kmax: usize) -> IterOptions {
    let d = IterOptions::default();
    IterOptions { tol: if tol > 0.0 { tol } else { d.tol }, kmax: if kmax > 0 { kmax } else { d.kmax }, ..d }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a network document (JSON, format version 1). Templates are
/// expanded at `truncation` (0 selects the template's own size). The
/// network is validated before it is returned.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dp_network_from_json(json: *const c_char, truncation: usize, out: *mut *mut DpNetwork) -> DpStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json).to_str().map_err(|e| fail(DpStatus::InvalidUtf8, e.to_string()))?;
        let source = parse_network(text).map_err(lib)?;
        let spec = source.spec((truncation > 0).then_some(truncation)).map_err(lib)?;
        let report = validate_network(&spec);
        if !report.passed() {
            let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.detail.clone()).collect();
            return Err(lib(Error::Validation(failed.join("; "))));
        }
        *out = Box::into_raw(Box::new(DpNetwork { spec }));
        Ok(())
    })
}

/// # Safety
/// `net` must come from [`dp_network_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dp_network_free(net: *mut DpNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of nodes, 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dp_network_size(net: *const DpNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.spec.n())
}

unsafe fn apply(
    net: *const DpNetwork,
    s: *const f64,
    len: usize,
    out: *mut f64,
    f: impl FnOnce(&NetworkSpec, &PlusVector) -> decaypath::error::Result<PlusVector>,
) -> DpStatus {
    guard(|| {
        let net = network(net)?;
        let n = net.spec.n();
        let s = input(s, len, n)?;
        let out = output(out, len, n)?;
        let g = f(&net.spec, &s).map_err(lib)?;
        out.copy_from_slice(g.as_slice());
        Ok(())
    })
}

/// `out = Γ(s)`; `s` and `out` hold `len = n` entries.
///
/// # Safety
/// `s` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dp_eval_gamma(net: *const DpNetwork, s: *const f64, len: usize, out: *mut f64) -> DpStatus {
    apply(net, s, len, out, eval_gamma)
}

/// `out = s ⊕ Γ(s)`.
///
/// # Safety
/// `s` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dp_eval_gamma_hat(net: *const DpNetwork, s: *const f64, len: usize, out: *mut f64) -> DpStatus {
    apply(net, s, len, out, eval_gamma_hat)
}

/// `out = r𝟙 ⊕ Γ(s)`.
///
/// # Safety
/// `s` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dp_eval_gamma_r(
    net: *const DpNetwork,
    r: f64,
    s: *const f64,
    len: usize,
    out: *mut f64,
) -> DpStatus {
    apply(net, s, len, out, |spec, s| eval_gamma_r(spec, r, s))
}

/// Minimal fixed point `σ_*(r)` of `Γᵣ`. `tol ≤ 0` and `kmax = 0` select
/// the defaults (1e-10, 100000).
///
/// # Safety
/// `out` must point to `len ≥ n` doubles.
#[no_mangle]
pub unsafe extern "C" fn dp_sigma_star(
    net: *const DpNetwork,
    r: f64,
    tol: f64,
    kmax: usize,
    out: *mut f64,
    len: usize,
) -> DpStatus {
    guard(|| {
        let net = network(net)?;
        let out = output(out, len, net.spec.n())?;
        let s = compute_sigma_star(&net.spec, r, &opts(tol, kmax)).map_err(lib)?;
        out.copy_from_slice(s.as_slice());
        Ok(())
    })
}

/// Spectral radius of a linear gain operator with Collatz–Wielandt bounds.
/// Any output pointer may be null.
///
/// # Safety
/// Non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn dp_spectral_radius(
    net: *const DpNetwork,
    value: *mut f64,
    lower: *mut f64,
    upper: *mut f64,
) -> DpStatus {
    guard(|| {
        let net = network(net)?;
        if !net.spec.is_linear_operator() {
            return Err(lib(Error::WrongClass("spectral radius needs linear gains with additive MAFs".into())));
        }
        let est = spectral_radius(&net.spec);
        for (p, v) in [(value, est.value), (lower, est.lower), (upper, est.upper)] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Sampled small-gain check. `*falsified` is set to 1 when some `s ≠ 0`
/// with `Γ(s) ≥ s` was found, in which case the witness is copied to
/// `witness` (may be null).
///
/// # Safety
/// `falsified` must be valid; a non-null `witness` must hold `len ≥ n` doubles.
#[no_mangle]
pub unsafe extern "C" fn dp_check_sgc(
    net: *const DpNetwork,
    samples: usize,
    seed: u64,
    falsified: *mut i32,
    witness: *mut f64,
    len: usize,
) -> DpStatus {
    guard(|| {
        let net = network(net)?;
        let flag = falsified.as_mut().ok_or_else(|| null("falsified"))?;
        let cert = check_sgc_sample(&net.spec, samples, seed).map_err(lib)?;
        *flag = i32::from(cert.verdict == Verdict::Falsified);
        if let (Some(Witness::Point { s }), false) = (&cert.witness, witness.is_null()) {
            output(witness, len, net.spec.n())?.copy_from_slice(s.as_slice());
        }
        Ok(())
    })
}

/// Builds `σ_*` on `grid` (positive, strictly increasing; 0 is prepended).
///
/// # Safety
/// `grid` must point to `grid_len` doubles and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn dp_path_table_build(
    net: *const DpNetwork,
    grid: *const f64,
    grid_len: usize,
    tol: f64,
    kmax: usize,
    out: *mut *mut DpPathTable,
) -> DpStatus {
    guard(|| {
        let net = network(net)?;
        if grid.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        *out = ptr::null_mut();
        let grid = std::slice::from_raw_parts(grid, grid_len);
        let table = build_path_table(&net.spec, grid, None, &opts(tol, kmax), PathMode::SigmaStar).map_err(lib)?;
        *out = Box::into_raw(Box::new(DpPathTable { table }));
        Ok(())
    })
}

/// # Safety
/// `t` must come from [`dp_path_table_build`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dp_path_table_free(t: *mut DpPathTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Grid length including the leading 0; 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dp_path_table_grid_len(t: *const DpPathTable) -> usize {
    t.as_ref().map_or(0, |t| t.table.grid().len())
}

/// Copies grid point `k` to `*r` and `σ(grid[k])` to `out`.
///
/// # Safety
/// `r` must be valid or null; `out` must hold `len ≥ n` doubles.
#[no_mangle]
pub unsafe extern "C" fn dp_path_table_sigma(
    t: *const DpPathTable,
    k: usize,
    r: *mut f64,
    out: *mut f64,
    len: usize,
) -> DpStatus {
    guard(|| {
        let t = &table(t)?.table;
        let m = t.grid().len();
        if k >= m {
            return Err(lib(Error::IndexOutOfRange { index: k, n: m }));
        }
        let out = output(out, len, t.dim())?;
        out.copy_from_slice(t.sigma()[k].as_slice());
        if let Some(r) = r.as_mut() {
            *r = t.grid()[k];
        }
        Ok(())
    })
}

unsafe fn lookup(
    t: *const DpPathTable,
    value: *mut f64,
    out_of_range: *mut i32,
    f: impl FnOnce(&PathTable) -> decaypath::error::Result<decaypath::path::Lookup>,
) -> DpStatus {
    guard(|| {
        let t = &table(t)?.table;
        let v = value.as_mut().ok_or_else(|| null("value"))?;
        let l = f(t).map_err(lib)?;
        *v = l.value;
        if let Some(o) = out_of_range.as_mut() {
            *o = i32::from(l.out_of_range);
        }
        Ok(())
    })
}

/// `σᵢ(r)` by linear interpolation; `*out_of_range` (may be null) is set
/// when `r` lies past the last grid point.
///
/// # Safety
/// `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dp_path_table_eval(
    t: *const DpPathTable,
    i: usize,
    r: f64,
    value: *mut f64,
    out_of_range: *mut i32,
) -> DpStatus {
    lookup(t, value, out_of_range, |t| t.eval(i, r))
}

/// `σᵢ⁻¹(v)`, exact on each segment.
///
/// # Safety
/// `value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dp_path_table_inverse(
    t: *const DpPathTable,
    i: usize,
    v: f64,
    value: *mut f64,
    out_of_range: *mut i32,
) -> DpStatus {
    lookup(t, value, out_of_range, |t| t.inverse(i, v))
}
