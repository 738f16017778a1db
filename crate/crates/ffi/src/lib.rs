//! C ABI over `cylkit`.
//!
//! Point sets and result lists are opaque handles created and freed by the
//! library. Every fallible function returns a [`CylkitStatus`]; on failure,
//! [`cylkit_last_error`] describes the problem. Cylinders are reported in the
//! caller's coordinates.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cylkit::enclosing::smallest_enclosing_cylinder;
use cylkit::five_point::{circumscribed_5, Verdict};
use cylkit::four_point::min_circumscribed_4;
use cylkit::{bestfit, center_points, CylError, Cylinder, PointSet, SolverConfig, Vec3};

/// Result codes. The first five match the exit codes of the `cylkit` CLI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CylkitStatus {
    Ok = 0,
    InputError = 1,
    NoConvergence = 2,
    RankDeficient = 3,
    DuplicatePoints = 4,
    NullPointer = 5,
    IndexOutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CylkitVerdict {
    Solutions = 0,
    NoneDefinite = 1,
    DegenerateDuplicatePoints = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylkitConfig {
    pub tol_rel: f64,
    pub tol_orth: f64,
    pub max_iter: u32,
    pub n_starts: u32,
    pub seed: u64,
    /// Newton step length factor in (0, 1].
    pub step_damping: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylkitCylinder {
    /// Unit direction, first nonzero component positive.
    pub direction: [f64; 3],
    /// Axis point nearest the centroid of the input.
    pub axis_point: [f64; 3],
    pub radius: f64,
    /// 1 when the cylinder is a strict local minimum of the radius, 0 when
    /// it is only stationary, -1 when not applicable.
    pub local_min: i32,
    /// 1 for the smallest radius of a list, 0 otherwise, -1 when not applicable.
    pub global_min: i32,
}

/// Opaque, immutable point set.
pub struct CylkitPointSet {
    inner: PointSet,
}

/// Opaque list of cylinders.
pub struct CylkitCylinderList {
    items: Vec<CylkitCylinder>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &CylError) -> CylkitStatus {
    match err {
        CylError::InvalidInput(_) | CylError::WrongPointCount { .. } => CylkitStatus::InputError,
        CylError::RankDeficient { .. }
        | CylError::SingularT
        | CylError::SingularCovariance
        | CylError::CollinearPoints => CylkitStatus::RankDeficient,
        CylError::DuplicatePoints { .. } => CylkitStatus::DuplicatePoints,
        CylError::NoConvergence { .. }
        | CylError::NoCandidateFound { .. }
        | CylError::EigenTies
        | CylError::AllCoefficientsZero => CylkitStatus::NoConvergence,
    }
}

/// Runs `body`, recording errors and turning panics into a status.
fn guarded(body: impl FnOnce() -> Result<(), (CylkitStatus, String)>) -> CylkitStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            CylkitStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CylkitStatus::Panic
        }
    }
}

fn solver_err(e: CylError) -> (CylkitStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CylkitStatus, String) {
    (CylkitStatus::NullPointer, format!("{what} is null"))
}

unsafe fn config_from(cfg: *const CylkitConfig) -> SolverConfig {
    match cfg.as_ref() {
        None => SolverConfig::default(),
        Some(c) => SolverConfig {
            tol_rel: c.tol_rel,
            tol_orth: c.tol_orth,
            max_iter: c.max_iter as usize,
            n_starts: c.n_starts as usize,
            seed: c.seed,
            step_damping: c.step_damping,
        },
    }
}

fn entry(ps: &PointSet, cyl: &Cylinder) -> CylkitCylinder {
    let d = cyl.canonical_direction();
    let p = cyl.c + ps.centroid_offset;
    CylkitCylinder {
        direction: [d.x + 0.0, d.y + 0.0, d.z + 0.0],
        axis_point: [p.x, p.y, p.z],
        radius: cyl.rho,
        local_min: -1,
        global_min: -1,
    }
}

fn into_list(items: Vec<CylkitCylinder>) -> *mut CylkitCylinderList {
    Box::into_raw(Box::new(CylkitCylinderList { items }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cylkit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn cylkit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Writes the default solver settings to `out`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cylkit_config_default(out: *mut CylkitConfig) -> CylkitStatus {
    guarded(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = SolverConfig::default();
        *out = CylkitConfig {
            tol_rel: d.tol_rel,
            tol_orth: d.tol_orth,
            max_iter: d.max_iter as u32,
            n_starts: d.n_starts as u32,
            seed: d.seed,
            step_damping: d.step_damping,
        };
        Ok(())
    })
}

/// Copies `n` points given as `3n` interleaved coordinates into a new handle.
///
/// # Safety
/// `xyz` must point to `3 * n` readable doubles and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cylkit_pointset_new(
    xyz: *const f64,
    n: usize,
    out: *mut *mut CylkitPointSet,
) -> CylkitStatus {
    guarded(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        if xyz.is_null() {
            return Err(null("xyz"));
        }
        let len = n
            .checked_mul(3)
            .ok_or((CylkitStatus::InputError, "too many points".to_string()))?;
        let coords = std::slice::from_raw_parts(xyz, len);
        let points: Vec<Vec3> = coords
            .chunks_exact(3)
            .map(|c| Vec3::new(c[0], c[1], c[2]))
            .collect();
        let inner = center_points(&points).map_err(solver_err)?;
        *out = Box::into_raw(Box::new(CylkitPointSet { inner }));
        Ok(())
    })
}

/// # Safety
/// `ps` must be null or a handle from [`cylkit_pointset_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cylkit_pointset_free(ps: *mut CylkitPointSet) {
    if !ps.is_null() {
        drop(Box::from_raw(ps));
    }
}

/// Number of points, 0 for a null handle.
///
/// # Safety
/// `ps` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cylkit_pointset_len(ps: *const CylkitPointSet) -> usize {
    ps.as_ref().map_or(0, |p| p.inner.n())
}

/// Best-fitting cylinder. `variance` may be null.
///
/// # Safety
/// `ps` must be a live handle, `cfg` null or readable, `out` writable,
/// `variance` null or writable.
#[no_mangle]
pub unsafe extern "C" fn cylkit_fit(
    ps: *const CylkitPointSet,
    cfg: *const CylkitConfig,
    out: *mut CylkitCylinder,
    variance: *mut f64,
) -> CylkitStatus {
    guarded(|| {
        let ps = &ps.as_ref().ok_or_else(|| null("ps"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let fit = bestfit::fit_cylinder(ps, &config_from(cfg)).map_err(solver_err)?;
        *out = entry(ps, &fit.cylinder);
        if let Some(v) = variance.as_mut() {
            *v = fit.variance;
        }
        Ok(())
    })
}

/// Stationary circumscribed cylinders of four points, ascending by radius,
/// with the local and global minimum flags set.
///
/// # Safety
/// `ps` must be a live handle, `cfg` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cylkit_circ4(
    ps: *const CylkitPointSet,
    cfg: *const CylkitConfig,
    out: *mut *mut CylkitCylinderList,
) -> CylkitStatus {
    guarded(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let ps = &ps.as_ref().ok_or_else(|| null("ps"))?.inner;
        let set = min_circumscribed_4(ps, &config_from(cfg)).map_err(solver_err)?;
        let items = set
            .minima
            .iter()
            .map(|m| CylkitCylinder {
                local_min: m.local_min as i32,
                global_min: m.global_min as i32,
                ..entry(ps, &m.cylinder)
            })
            .collect();
        *out = into_list(items);
        Ok(())
    })
}

/// All cylinders through five points. An empty list comes with the verdict
/// explaining it; duplicate points return `DuplicatePoints`.
///
/// # Safety
/// `ps` must be a live handle; `out` writable; `verdict` null or writable.
#[no_mangle]
pub unsafe extern "C" fn cylkit_circ5(
    ps: *const CylkitPointSet,
    out: *mut *mut CylkitCylinderList,
    verdict: *mut CylkitVerdict,
) -> CylkitStatus {
    guarded(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let ps = &ps.as_ref().ok_or_else(|| null("ps"))?.inner;
        let result = circumscribed_5(ps);
        if let Some(v) = verdict.as_mut() {
            *v = match &result {
                Ok(s) => match s.verdict {
                    Verdict::Solutions => CylkitVerdict::Solutions,
                    Verdict::NoneDefinite => CylkitVerdict::NoneDefinite,
                    Verdict::DegenerateDuplicatePoints => CylkitVerdict::DegenerateDuplicatePoints,
                },
                Err(_) => CylkitVerdict::DegenerateDuplicatePoints,
            };
        }
        let set = result.map_err(solver_err)?;
        *out = into_list(set.cylinders.iter().map(|c| entry(ps, c)).collect());
        Ok(())
    })
}

/// Smallest enclosing cylinder. The indices of the `*k` support points
/// (at most 5) are written to `support`, which may be null.
///
/// # Safety
/// `ps` must be a live handle, `cfg` null or readable, `out` writable,
/// `support` null or writable for 5 values, `k` null or writable.
#[no_mangle]
pub unsafe extern "C" fn cylkit_enclose(
    ps: *const CylkitPointSet,
    cfg: *const CylkitConfig,
    out: *mut CylkitCylinder,
    support: *mut usize,
    k: *mut usize,
) -> CylkitStatus {
    guarded(|| {
        let ps = &ps.as_ref().ok_or_else(|| null("ps"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let res = smallest_enclosing_cylinder(ps, &config_from(cfg)).map_err(solver_err)?;
        *out = entry(ps, &res.cylinder);
        if !support.is_null() {
            std::slice::from_raw_parts_mut(support, res.support.len())
                .copy_from_slice(&res.support);
        }
        if let Some(k) = k.as_mut() {
            *k = res.support.len();
        }
        Ok(())
    })
}

/// Number of cylinders, 0 for a null handle.
///
/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cylkit_list_len(list: *const CylkitCylinderList) -> usize {
    list.as_ref().map_or(0, |l| l.items.len())
}

/// # Safety
/// `list` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cylkit_list_get(
    list: *const CylkitCylinderList,
    index: usize,
    out: *mut CylkitCylinder,
) -> CylkitStatus {
    guarded(|| {
        let list = list.as_ref().ok_or_else(|| null("list"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = *list.items.get(index).ok_or((
            CylkitStatus::IndexOutOfRange,
            format!(
                "index {index} out of range for {} cylinders",
                list.items.len()
            ),
        ))?;
        Ok(())
    })
}

/// # Safety
/// `list` must be null or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cylkit_list_free(list: *mut CylkitCylinderList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}
