//! C ABI for the wordeq library: opaque handles, integer status codes, and
//! JSON strings across the boundary. The generated header lives in
//! `include/wordeq.h`.
//!
//! Conventions: every function returns a [`WeqStatus`]; outputs are written
//! through out-pointers. Strings returned by this library must be released
//! with [`weq_string_free`], handles with their matching `_free` function.
//! The last error message is kept per thread and read with
//! [`weq_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use wordeq::diagrams::DiagramError;
use wordeq::jsonio;
use wordeq::oracle::{enumerate_exhaustive, enumerate_levi, SearchBudget};
use wordeq::parse::parse_equations;
use wordeq::pseudogroup::{associated_graph, run_machine, BandSystem};
use wordeq::{EquationSystem, SolutionSet};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).ok();
    });
}

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeqStatus {
    WeqOk = 0,
    WeqNullPointer = 1,
    WeqInvalidUtf8 = 2,
    WeqParseError = 3,
    WeqBudgetExceeded = 4,
    WeqCoverageIncomplete = 5,
    WeqInvalidInput = 6,
}

/// Opaque handle to a parsed equation system.
pub struct WeqSystem {
    inner: EquationSystem,
}

/// Opaque handle to an enumerated solution set.
pub struct WeqSolutions {
    inner: SolutionSet,
    alphabet_of: EquationSystem,
}

/// Opaque handle to a band system.
pub struct WeqBandSystem {
    inner: BandSystem,
}

unsafe fn read_utf8<'a>(ptr: *const c_char) -> Result<&'a str, WeqStatus> {
    if ptr.is_null() {
        set_error("null pointer argument".into());
        return Err(WeqStatus::WeqNullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        WeqStatus::WeqInvalidUtf8
    })
}

fn give_string(s: String, out: *mut *mut c_char) -> WeqStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            WeqStatus::WeqOk
        }
        Err(_) => {
            set_error("output contained an interior NUL byte".into());
            WeqStatus::WeqInvalidInput
        }
    }
}

/// Returns the last error message recorded on this thread, or NULL. The
/// pointer is owned by the library and valid until the next failing call.
#[no_mangle]
pub extern "C" fn weq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.as_ptr(),
        None => ptr::null(),
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-parameter of
/// this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn weq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an equation file (the same text format the CLI reads).
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be a valid
/// pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn weq_system_parse(
    text: *const c_char,
    out: *mut *mut WeqSystem,
) -> WeqStatus {
    if out.is_null() {
        set_error("null out-pointer".into());
        return WeqStatus::WeqNullPointer;
    }
    let text = match read_utf8(text) {
        Ok(t) => t,
        Err(e) => return e,
    };
    match parse_equations(text) {
        Ok(sys) => {
            *out = Box::into_raw(Box::new(WeqSystem { inner: sys }));
            WeqStatus::WeqOk
        }
        Err(e) => {
            set_error(e.to_string());
            WeqStatus::WeqParseError
        }
    }
}

/// # Safety
/// `sys` must come from [`weq_system_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn weq_system_free(sys: *mut WeqSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of equations in the system.
///
/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn weq_system_equation_count(sys: *const WeqSystem) -> usize {
    if sys.is_null() {
        return 0;
    }
    (*sys).inner.equations().len()
}

/// Enumerates all solutions at bounded length with both strategies and
/// cross-checks them; disagreement is reported as invalid input.
///
/// # Safety
/// `sys` must be a live handle; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn weq_solve(
    sys: *const WeqSystem,
    max_len: u32,
    max_solutions: u64,
    max_nodes: u64,
    out: *mut *mut WeqSolutions,
) -> WeqStatus {
    if sys.is_null() || out.is_null() {
        set_error("null pointer argument".into());
        return WeqStatus::WeqNullPointer;
    }
    let system = &(*sys).inner;
    let budget =
        match SearchBudget::new(max_len as usize, max_solutions as usize, max_nodes as usize) {
            Ok(b) => b,
            Err(e) => {
                set_error(e.to_string());
                return WeqStatus::WeqInvalidInput;
            }
        };
    let a = enumerate_exhaustive(system, &budget);
    let b = enumerate_levi(system, &budget);
    match (a, b) {
        (Ok(x), Ok(y)) => {
            if x != y {
                set_error("oracle disagreement between exhaustive and Levi enumeration".into());
                return WeqStatus::WeqInvalidInput;
            }
            *out = Box::into_raw(Box::new(WeqSolutions {
                inner: x,
                alphabet_of: system.clone(),
            }));
            WeqStatus::WeqOk
        }
        (Err(e), _) | (_, Err(e)) => {
            set_error(e.to_string());
            WeqStatus::WeqBudgetExceeded
        }
    }
}

/// # Safety
/// `sols` must come from [`weq_solve`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn weq_solutions_free(sols: *mut WeqSolutions) {
    if !sols.is_null() {
        drop(Box::from_raw(sols));
    }
}

/// Number of solutions held by the handle.
///
/// # Safety
/// `sols` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn weq_solutions_len(sols: *const WeqSolutions) -> usize {
    if sols.is_null() {
        return 0;
    }
    (*sols).inner.solutions.len()
}

/// Whether the enumeration finished without hitting a cap.
///
/// # Safety
/// `sols` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn weq_solutions_complete(sols: *const WeqSolutions) -> bool {
    if sols.is_null() {
        return false;
    }
    (*sols).inner.complete
}

/// Writes the whole solution set as a JSON document.
///
/// # Safety
/// `sols` must be a live handle; `out` a valid slot; free the string with
/// [`weq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn weq_solutions_to_json(
    sols: *const WeqSolutions,
    out: *mut *mut c_char,
) -> WeqStatus {
    if sols.is_null() || out.is_null() {
        set_error("null pointer argument".into());
        return WeqStatus::WeqNullPointer;
    }
    let handle = &*sols;
    give_string(
        jsonio::solution_set_to_json(&handle.inner, handle.alphabet_of.alphabet()),
        out,
    )
}

/// Parses a band-system JSON document.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn weq_band_system_parse(
    json: *const c_char,
    out: *mut *mut WeqBandSystem,
) -> WeqStatus {
    if out.is_null() {
        set_error("null out-pointer".into());
        return WeqStatus::WeqNullPointer;
    }
    let text = match read_utf8(json) {
        Ok(t) => t,
        Err(e) => return e,
    };
    match jsonio::band_system_from_json(text) {
        Ok(bs) => {
            *out = Box::into_raw(Box::new(WeqBandSystem { inner: bs }));
            WeqStatus::WeqOk
        }
        Err(e) => {
            set_error(e.to_string());
            WeqStatus::WeqParseError
        }
    }
}

/// # Safety
/// `bs` must come from [`weq_band_system_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn weq_band_system_free(bs: *mut WeqBandSystem) {
    if !bs.is_null() {
        drop(Box::from_raw(bs));
    }
}

/// Euler characteristic of the associated graph.
///
/// # Safety
/// `bs` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn weq_band_system_chi(bs: *const WeqBandSystem) -> i64 {
    if bs.is_null() {
        return 0;
    }
    associated_graph(&(*bs).inner).euler_characteristic
}

/// Runs the machine for at most `steps` moves and writes the trace as one
/// JSON record per line. The handle itself is not modified.
///
/// # Safety
/// `bs` must be a live handle; `out` a valid slot; free the string with
/// [`weq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn weq_band_run_trace(
    bs: *const WeqBandSystem,
    steps: u32,
    out: *mut *mut c_char,
) -> WeqStatus {
    if bs.is_null() || out.is_null() {
        set_error("null pointer argument".into());
        return WeqStatus::WeqNullPointer;
    }
    let (_, trace) = run_machine(&(*bs).inner, steps as usize);
    let lines: Vec<String> = trace.iter().map(jsonio::move_record_to_json).collect();
    give_string(lines.join("\n"), out)
}

/// Checks a diagram JSON document against the oracle and writes the report
/// as JSON. Full coverage returns `WeqOk`; a nonempty uncovered set returns
/// `WeqCoverageIncomplete` with the report still written.
///
/// # Safety
/// `mrd_json` must be a valid NUL-terminated string; `out` a valid slot;
/// free the string with [`weq_string_free`].
#[no_mangle]
pub unsafe extern "C" fn weq_diagram_check(
    mrd_json: *const c_char,
    max_len: u32,
    twist_depth: u32,
    out: *mut *mut c_char,
) -> WeqStatus {
    if out.is_null() {
        set_error("null out-pointer".into());
        return WeqStatus::WeqNullPointer;
    }
    let text = match read_utf8(mrd_json) {
        Ok(t) => t,
        Err(e) => return e,
    };
    let diagram = match jsonio::mr_diagram_from_json(text) {
        Ok(d) => d,
        Err(e) => {
            set_error(e.to_string());
            return WeqStatus::WeqParseError;
        }
    };
    let budget = match SearchBudget::new(max_len as usize, 1_000_000, 100_000_000) {
        Ok(b) => b,
        Err(e) => {
            set_error(e.to_string());
            return WeqStatus::WeqInvalidInput;
        }
    };
    match wordeq::diagrams::diagram_check(&diagram, &budget, twist_depth as usize) {
        Ok(report) => {
            let json = serde_json::json!({
                "oracle": report.oracle_size,
                "uncovered": report.uncovered.len(),
                "resolutions": report
                    .per_resolution
                    .iter()
                    .map(|(name, covered, uncovered)| serde_json::json!({
                        "name": name, "covered": covered, "uncovered": uncovered
                    }))
                    .collect::<Vec<_>>(),
            })
            .to_string();
            let fully = report.fully_covers();
            let status = give_string(json, out);
            if status != WeqStatus::WeqOk {
                return status;
            }
            if fully {
                WeqStatus::WeqOk
            } else {
                set_error("diagram leaves oracle solutions uncovered".into());
                WeqStatus::WeqCoverageIncomplete
            }
        }
        Err(DiagramError::Budget(e)) => {
            set_error(e.to_string());
            WeqStatus::WeqBudgetExceeded
        }
        Err(e) => {
            set_error(e.to_string());
            WeqStatus::WeqInvalidInput
        }
    }
}
