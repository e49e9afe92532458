use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use zkcyl::ZkError;

pub const ZK_OK: i32 = 0;
/// A required pointer argument was null.
pub const ZK_ERR_NULL: i32 = -1;
/// An argument or grid was rejected.
pub const ZK_ERR_INVALID: i32 = -2;
/// The computation blew up or did not converge.
pub const ZK_ERR_NUMERICAL: i32 = -3;
/// The requested regularity lies outside the feasible range.
pub const ZK_ERR_INFEASIBLE: i32 = -4;
/// A Rust panic was caught at the boundary.
pub const ZK_ERR_PANIC: i32 = -5;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

pub(crate) fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

pub(crate) fn code_of(e: &ZkError) -> i32 {
    match e {
        ZkError::NonFinite { .. } | ZkError::NotConverged(_) => ZK_ERR_NUMERICAL,
        ZkError::Infeasible(_) => ZK_ERR_INFEASIBLE,
        _ => ZK_ERR_INVALID,
    }
}

pub(crate) struct Fail(pub i32, pub String);

impl From<ZkError> for Fail {
    fn from(e: ZkError) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

pub(crate) fn null(name: &str) -> Fail {
    Fail(ZK_ERR_NULL, format!("`{name}` is null"))
}

/// Runs `body`, translating errors and panics into codes and the
/// thread-local message.
pub(crate) fn guard(body: impl FnOnce() -> Result<(), Fail>) -> i32 {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ZK_OK,
        Ok(Err(Fail(code, msg))) => {
            set_last_error(&msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal error: {msg}"));
            ZK_ERR_PANIC
        }
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn zk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}
