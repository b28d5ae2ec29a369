use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};

use atlab_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtlabStatus {
    Ok = 0,
    InvalidArgument = 1,
    /// Quadrature or finite differences could not reach the requested accuracy.
    Numerical = 2,
    Io = 3,
    Config = 4,
    NullPointer = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

pub(crate) fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

pub(crate) fn status_of(err: &Error) -> AtlabStatus {
    match err {
        Error::InvalidArgument(_) | Error::TooFewSamples { .. } => AtlabStatus::InvalidArgument,
        Error::Quadrature { .. } | Error::StencilCrossesZero { .. } => AtlabStatus::Numerical,
        Error::Config(_) | Error::UnknownExperiment { .. } => AtlabStatus::Config,
        Error::ReadFile { .. } | Error::Io(_) | Error::Json(_) | Error::Csv(_) => AtlabStatus::Io,
    }
}

/// Failure raised inside the boundary layer itself.
pub(crate) struct Fail(pub AtlabStatus, pub String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

pub(crate) fn null(name: &str) -> Fail {
    Fail(AtlabStatus::NullPointer, format!("`{name}` is null"))
}

/// Runs `body`, records any error or panic, and maps it to a status.
pub(crate) fn guard(body: impl FnOnce() -> Result<(), Fail> + UnwindSafe) -> AtlabStatus {
    clear_last_error();
    match catch_unwind(body) {
        Ok(Ok(())) => AtlabStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("panic: {msg}"));
            AtlabStatus::Panic
        }
    }
}

/// Message of the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn atlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn atlab_status_name(status: i32) -> *const c_char {
    let s: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"invalid argument\0",
        2 => b"numerical failure\0",
        3 => b"i/o error\0",
        4 => b"config error\0",
        5 => b"null pointer\0",
        6 => b"panic\0",
        _ => b"unknown status\0",
    };
    s.as_ptr().cast()
}
