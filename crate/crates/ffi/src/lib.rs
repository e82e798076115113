//! C ABI for the solver: opaque handles for configurations and solutions,
//! integer status codes, and copy-out accessors for the interface curve,
//! node fields and diagnostics. The matching header is committed at
//! `include/cdeuler.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::path::Path;
use std::ptr;

use cdeuler::config::RunConfig;
use cdeuler::diagnostics::{diagnostics, DiagnosticsReport};
use cdeuler::eos::{FlowConstants, PhaseTag};
use cdeuler::profiles::EntranceProfiles;
use cdeuler::solver::{solve_truncated, Solution, SolverConfig};

pub const CDEULER_OK: c_int = 0;
pub const CDEULER_ERR_CONFIG: c_int = 2;
pub const CDEULER_ERR_SOLVER: c_int = 3;
pub const CDEULER_ERR_IO: c_int = 4;
pub const CDEULER_ERR_INVALID_ARGUMENT: c_int = 5;
pub const CDEULER_ERR_PANIC: c_int = 6;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &cdeuler::Error) -> c_int {
    err.exit_code() as c_int
}

/// Opaque parsed configuration.
pub struct Config {
    run: RunConfig,
    consts: FlowConstants,
    profiles: EntranceProfiles,
    solver: SolverConfig,
}

/// Opaque converged solution with its diagnostics.
pub struct SolutionHandle {
    solution: Solution,
    report: DiagnosticsReport,
}

fn catch<F: FnOnce() -> c_int + std::panic::UnwindSafe>(f: F) -> c_int {
    match std::panic::catch_unwind(f) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            CDEULER_ERR_PANIC
        }
    }
}

/// Parse and validate a TOML configuration document.
///
/// # Safety
/// `toml_text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_config_parse(
    toml_text: *const c_char,
    out: *mut *mut Config,
) -> c_int {
    if toml_text.is_null() || out.is_null() {
        set_error("null argument");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    let text = match CStr::from_ptr(toml_text).to_str() {
        Ok(t) => t.to_owned(),
        Err(_) => {
            set_error("config text is not valid UTF-8");
            return CDEULER_ERR_INVALID_ARGUMENT;
        }
    };
    *out = ptr::null_mut();
    let out_addr = out as usize;
    catch(move || {
        let run = match RunConfig::parse(&text) {
            Ok(c) => c,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let (consts, profiles, solver) = match run.build() {
            Ok(t) => t,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let handle = Box::new(Config {
            run,
            consts,
            profiles,
            solver,
        });
        unsafe { *(out_addr as *mut *mut Config) = Box::into_raw(handle) };
        CDEULER_OK
    })
}

/// Release a configuration handle.
///
/// # Safety
/// `config` must come from `cdeuler_config_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_config_free(config: *mut Config) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Effective configuration (defaults filled) as TOML; caller frees with
/// `cdeuler_string_free`.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_config_effective_toml(config: *const Config) -> *mut c_char {
    if config.is_null() {
        return ptr::null_mut();
    }
    let text = (*config).run.to_toml();
    CString::new(text).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Run one truncated solve.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_solve(
    config: *const Config,
    out: *mut *mut SolutionHandle,
) -> c_int {
    if config.is_null() || out.is_null() {
        set_error("null argument");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    *out = ptr::null_mut();
    let cfg_addr = config as usize;
    let out_addr = out as usize;
    catch(move || {
        let cfg = unsafe { &*(cfg_addr as *const Config) };
        match solve_truncated(&cfg.consts, &cfg.profiles, &cfg.solver) {
            Ok(solution) => {
                let report = diagnostics(&solution, &cfg.profiles);
                let handle = Box::new(SolutionHandle { solution, report });
                unsafe { *(out_addr as *mut *mut SolutionHandle) = Box::into_raw(handle) };
                CDEULER_OK
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Release a solution handle.
///
/// # Safety
/// `solution` must come from `cdeuler_solve` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_solution_free(solution: *mut SolutionHandle) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of interface nodes.
///
/// # Safety
/// `solution` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_solution_interface_len(solution: *const SolutionHandle) -> usize {
    if solution.is_null() {
        return 0;
    }
    (*solution).solution.f.f.len()
}

/// Copy the interface curve into caller buffers of length `len`.
///
/// # Safety
/// `x` and `f` must point to at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_solution_interface(
    solution: *const SolutionHandle,
    x: *mut f64,
    f: *mut f64,
    len: usize,
) -> c_int {
    if solution.is_null() || x.is_null() || f.is_null() {
        set_error("null argument");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    let curve = &(*solution).solution.f;
    if len < curve.f.len() {
        set_error("buffer too small for interface curve");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    ptr::copy_nonoverlapping(curve.x.as_ptr(), x, curve.x.len());
    ptr::copy_nonoverlapping(curve.f.as_ptr(), f, curve.f.len());
    CDEULER_OK
}

fn phase_of(phase: c_int) -> Option<PhaseTag> {
    match phase {
        0 => Some(PhaseTag::Plus),
        1 => Some(PhaseTag::Minus),
        _ => None,
    }
}

/// Cell counts of one phase grid; node counts are one larger.
///
/// # Safety
/// Pointers must be valid; `phase` is 0 (plus) or 1 (minus).
#[no_mangle]
pub unsafe extern "C" fn cdeuler_solution_grid_size(
    solution: *const SolutionHandle,
    phase: c_int,
    n_x: *mut usize,
    n_s: *mut usize,
) -> c_int {
    if solution.is_null() || n_x.is_null() || n_s.is_null() {
        set_error("null argument");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    let Some(tag) = phase_of(phase) else {
        set_error("phase must be 0 (plus) or 1 (minus)");
        return CDEULER_ERR_INVALID_ARGUMENT;
    };
    let st = (*solution).solution.phase(tag);
    *n_x = st.grid.nx;
    *n_s = st.grid.ns;
    CDEULER_OK
}

/// Copy one node field (x-major, `(n_x+1)*(n_s+1)` values) into `out`.
/// Field names: x, r, S, Lambda, phi, psi, rho, u_x, u_r, u_theta, p.
///
/// # Safety
/// `out` must point to at least `len` doubles; `name` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_solution_field(
    solution: *const SolutionHandle,
    phase: c_int,
    name: *const c_char,
    out: *mut f64,
    len: usize,
) -> c_int {
    if solution.is_null() || name.is_null() || out.is_null() {
        set_error("null argument");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    let Some(tag) = phase_of(phase) else {
        set_error("phase must be 0 (plus) or 1 (minus)");
        return CDEULER_ERR_INVALID_ARGUMENT;
    };
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        set_error("field name is not valid UTF-8");
        return CDEULER_ERR_INVALID_ARGUMENT;
    };
    let sol = &(*solution).solution;
    let st = sol.phase(tag);
    let g = &st.grid;
    let n = g.n_nodes();
    if len < n {
        set_error("buffer too small for field");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    let u0 = sol.constants.u0(tag);
    let value = |i: usize, j: usize| -> Option<f64> {
        Some(match name {
            "x" => g.x[i],
            "r" => g.r_at(i, j),
            "S" => st.s.at(i, j),
            "Lambda" => st.lambda.at(i, j),
            "phi" => u0 * g.x[i] + st.phi_hat.at(i, j),
            "psi" => st.psi.at(i, j),
            "rho" => st.rho.at(i, j),
            "u_x" => st.u_x.at(i, j),
            "u_r" => st.u_r.at(i, j),
            "u_theta" => st.u_theta.at(i, j),
            "p" => st.p.at(i, j),
            _ => return None,
        })
    };
    let mut k = 0usize;
    for i in 0..=g.nx {
        for j in 0..=g.ns {
            match value(i, j) {
                Some(v) => {
                    *out.add(k) = v;
                    k += 1;
                }
                None => {
                    set_error("unknown field name");
                    return CDEULER_ERR_INVALID_ARGUMENT;
                }
            }
        }
    }
    CDEULER_OK
}

/// Look up one diagnostics entry by key (the summary-report keys).
///
/// # Safety
/// Pointers must be valid; `key` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_solution_diagnostic(
    solution: *const SolutionHandle,
    key: *const c_char,
    out: *mut f64,
) -> c_int {
    if solution.is_null() || key.is_null() || out.is_null() {
        set_error("null argument");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    let Ok(key) = CStr::from_ptr(key).to_str() else {
        set_error("key is not valid UTF-8");
        return CDEULER_ERR_INVALID_ARGUMENT;
    };
    match (*solution).report.entries.get(key) {
        Some(v) => {
            *out = *v;
            CDEULER_OK
        }
        None => {
            set_error("unknown diagnostics key");
            CDEULER_ERR_INVALID_ARGUMENT
        }
    }
}

/// Write the full output set (interface, fields, summary) into a directory.
///
/// # Safety
/// `dir` must be a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn cdeuler_solution_write(
    solution: *const SolutionHandle,
    dir: *const c_char,
) -> c_int {
    if solution.is_null() || dir.is_null() {
        set_error("null argument");
        return CDEULER_ERR_INVALID_ARGUMENT;
    }
    let Ok(dir) = CStr::from_ptr(dir).to_str() else {
        set_error("path is not valid UTF-8");
        return CDEULER_ERR_INVALID_ARGUMENT;
    };
    let handle = &*solution;
    match cdeuler::output::write_solution(&handle.solution, &handle.report, Path::new(dir)) {
        Ok(()) => CDEULER_OK,
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Message of the last error on this thread; valid until the next failing
/// call.
#[no_mangle]
pub extern "C" fn cdeuler_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version string.
#[no_mangle]
pub extern "C" fn cdeuler_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}
