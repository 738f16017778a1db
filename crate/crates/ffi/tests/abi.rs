use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cylkit_ffi::*;

fn tetrahedron() -> [f64; 12] {
    [
        1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0,
    ]
}

fn new_set(xyz: &[f64]) -> *mut CylkitPointSet {
    let mut ps = ptr::null_mut();
    assert_eq!(
        unsafe { cylkit_pointset_new(xyz.as_ptr(), xyz.len() / 3, &mut ps) },
        CylkitStatus::Ok
    );
    ps
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cylkit_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn list_items(list: *const CylkitCylinderList) -> Vec<CylkitCylinder> {
    let n = unsafe { cylkit_list_len(list) };
    (0..n)
        .map(|i| {
            let mut c = std::mem::MaybeUninit::uninit();
            assert_eq!(
                unsafe { cylkit_list_get(list, i, c.as_mut_ptr()) },
                CylkitStatus::Ok
            );
            unsafe { c.assume_init() }
        })
        .collect()
}

#[test]
fn enclose_and_circ4_tetrahedron() {
    let ps = new_set(&tetrahedron());
    assert_eq!(unsafe { cylkit_pointset_len(ps) }, 4);

    let mut cyl = std::mem::MaybeUninit::uninit();
    let mut support = [usize::MAX; 5];
    let mut k = 0;
    let status = unsafe {
        cylkit_enclose(
            ps,
            ptr::null(),
            cyl.as_mut_ptr(),
            support.as_mut_ptr(),
            &mut k,
        )
    };
    assert_eq!(status, CylkitStatus::Ok);
    let cyl = unsafe { cyl.assume_init() };
    assert!((cyl.radius - 2f64.sqrt()).abs() < 1e-9);
    assert_eq!((k, &support[..4]), (4, &[0, 1, 2, 3][..]));
    assert_eq!(last_error(), "");

    let mut list = ptr::null_mut();
    assert_eq!(
        unsafe { cylkit_circ4(ps, ptr::null(), &mut list) },
        CylkitStatus::Ok
    );
    let items = list_items(list);
    assert_eq!(items.iter().filter(|c| c.global_min == 1).count(), 3);
    assert!(items
        .iter()
        .filter(|c| c.local_min == 0)
        .all(|c| (c.radius - 1.5).abs() < 1e-9));
    let mut out = items[0];
    assert_eq!(
        unsafe { cylkit_list_get(list, items.len(), &mut out) },
        CylkitStatus::IndexOutOfRange
    );
    unsafe {
        cylkit_list_free(list);
        cylkit_pointset_free(ps);
    }
}

#[test]
fn circ5_bipyramid_and_duplicates() {
    let s = 3f64.sqrt() / 2.0;
    let bipyramid = [
        0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, -0.5, s, 0.0, -0.5, -s, 0.0,
    ];
    let shifted: Vec<f64> = bipyramid
        .iter()
        .enumerate()
        .map(|(i, v)| v + [5.0, -1.0, 2.0][i % 3])
        .collect();
    let ps = new_set(&shifted);
    let mut list = ptr::null_mut();
    let mut verdict = CylkitVerdict::NoneDefinite;
    assert_eq!(
        unsafe { cylkit_circ5(ps, &mut list, &mut verdict) },
        CylkitStatus::Ok
    );
    assert_eq!(verdict, CylkitVerdict::Solutions);
    let items = list_items(list);
    assert_eq!(items.len(), 6);
    for c in &items {
        assert!((c.radius - 5.0 / 6.0).abs() < 1e-12);
        // axis points come back in the caller's frame
        let p = c.axis_point;
        let d = ((p[0] - 5.0).powi(2) + (p[1] + 1.0).powi(2) + (p[2] - 2.0).powi(2)).sqrt();
        assert!((d - 1.0 / 6.0).abs() < 1e-12);
    }
    unsafe {
        cylkit_list_free(list);
        cylkit_pointset_free(ps);
    }

    let mut dup = tetrahedron().to_vec();
    dup.extend_from_slice(&[1.0, 1.0, 1.0]);
    let ps = new_set(&dup);
    let mut list = ptr::null_mut();
    assert_eq!(
        unsafe { cylkit_circ5(ps, &mut list, ptr::null_mut()) },
        CylkitStatus::DuplicatePoints
    );
    assert!(list.is_null());
    assert!(last_error().contains("identical"));
    unsafe { cylkit_pointset_free(ps) };
}

#[test]
fn fit_with_explicit_config() {
    let mut cfg = std::mem::MaybeUninit::uninit();
    assert_eq!(
        unsafe { cylkit_config_default(cfg.as_mut_ptr()) },
        CylkitStatus::Ok
    );
    let mut cfg = unsafe { cfg.assume_init() };
    cfg.n_starts = 20;
    // eight points on the unit cylinder about z
    let mut xyz = Vec::new();
    for i in 0..8 {
        let a = i as f64 * 0.8;
        xyz.extend_from_slice(&[a.cos(), a.sin(), i as f64 * 0.3 - 1.0]);
    }
    let ps = new_set(&xyz);
    let mut cyl = std::mem::MaybeUninit::uninit();
    let mut variance = -1.0;
    assert_eq!(
        unsafe { cylkit_fit(ps, &cfg, cyl.as_mut_ptr(), &mut variance) },
        CylkitStatus::Ok
    );
    let cyl = unsafe { cyl.assume_init() };
    assert!(variance < 1e-20);
    assert!((cyl.radius - 1.0).abs() < 1e-9);
    assert!((cyl.direction[2] - 1.0).abs() < 1e-9);

    cfg.n_starts = 0;
    let mut out = cyl;
    assert_eq!(
        unsafe { cylkit_fit(ps, &cfg, &mut out, ptr::null_mut()) },
        CylkitStatus::InputError
    );
    unsafe { cylkit_pointset_free(ps) };
}

#[test]
fn errors_and_null_handles() {
    let mut ps = ptr::null_mut();
    assert_eq!(
        unsafe { cylkit_pointset_new(ptr::null(), 3, &mut ps) },
        CylkitStatus::NullPointer
    );
    assert_eq!(last_error(), "xyz is null");
    let nan = [f64::NAN, 0.0, 0.0];
    assert_eq!(
        unsafe { cylkit_pointset_new(nan.as_ptr(), 1, &mut ps) },
        CylkitStatus::InputError
    );
    assert!(ps.is_null());

    let flat = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
    let ps = new_set(&flat);
    let mut list = ptr::null_mut();
    assert_eq!(
        unsafe { cylkit_circ4(ps, ptr::null(), &mut list) },
        CylkitStatus::RankDeficient
    );
    unsafe { cylkit_pointset_free(ps) };

    let mut out = std::mem::MaybeUninit::uninit();
    assert_eq!(
        unsafe {
            cylkit_enclose(
                ptr::null(),
                ptr::null(),
                out.as_mut_ptr(),
                ptr::null_mut(),
                ptr::null_mut(),
            )
        },
        CylkitStatus::NullPointer
    );
    assert_eq!(unsafe { cylkit_list_len(ptr::null()) }, 0);
    assert_eq!(unsafe { cylkit_pointset_len(ptr::null()) }, 0);
    unsafe {
        cylkit_list_free(ptr::null_mut());
        cylkit_pointset_free(ptr::null_mut());
    }
    let version = unsafe { CStr::from_ptr(cylkit_version()) }
        .to_str()
        .unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cylkit.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    let src =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| {
            l.trim_start()
                .strip_prefix("pub unsafe extern \"C\" fn ")
                .or(l.trim_start().strip_prefix("pub extern \"C\" fn "))
        })
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 12);
    for name in exported {
        assert!(
            text.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    assert!(text.contains("typedef struct CylkitPointSet CylkitPointSet;"));
    assert!(text.contains("CYLKIT_STATUS_DUPLICATE_POINTS = 4"));
}

/// Compiles a C program against the header and the static library, when a
/// C compiler and the archive are available.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let archive = profile_dir.join("libcylkit_ffi.a");
    let have_cc = Command::new("cc")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success());
    if !archive.exists() || !have_cc {
        eprintln!("skipping: cc or {} not available", archive.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("c_program");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c_program.c");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-O1"])
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&archive)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "C program exited with {:?}",
        out.status.code()
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("radius 1.41421356"));
}
