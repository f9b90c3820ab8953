use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hetcdc_ffi::*;

fn config(m: &[u64], n: u64) -> *mut HetcdcConfig {
    let mut cfg = ptr::null_mut();
    let s = unsafe { hetcdc_config_new(m.as_ptr(), m.len(), n, &mut cfg) };
    assert_eq!(s, HetcdcStatus::Ok);
    cfg
}

fn rational(num: i64, den: i64) -> HetcdcRational {
    HetcdcRational { num, den }
}

#[test]
fn worked_example_through_abi() {
    let cfg = config(&[6, 7, 7], 12);
    let mut l = HetcdcRational::default();
    unsafe {
        assert_eq!(hetcdc_optimal_load(cfg, &mut l), HetcdcStatus::Ok);
        assert_eq!(l, rational(12, 1));
        let mut r = 0u32;
        assert_eq!(hetcdc_classify_regime(cfg, &mut r), HetcdcStatus::Ok);
        assert_eq!(r, 2);
        let mut b = HetcdcBounds::default();
        assert_eq!(hetcdc_lower_bounds(cfg, &mut b), HetcdcStatus::Ok);
        assert_eq!(b.genie, rational(10, 1));
        assert_eq!(b.max_bound, rational(12, 1));
        assert_eq!(hetcdc_lp_optimum(cfg, &mut l), HetcdcStatus::Ok);
        assert_eq!(l, rational(12, 1));
        assert_eq!(hetcdc_oracle_min(cfg, 10_000_000, &mut l), HetcdcStatus::Ok);
        assert_eq!(l, rational(12, 1));
        hetcdc_config_free(cfg);
    }
}

#[test]
fn half_integer_placement() {
    let cfg = config(&[2, 2, 2], 3);
    let mut p = ptr::null_mut();
    let mut l = HetcdcRational::default();
    unsafe {
        assert_eq!(hetcdc_placement_new(cfg, &mut p), HetcdcStatus::Ok);
        assert_eq!(hetcdc_placement_scale(p), 2);
        assert_eq!(hetcdc_placement_load(p, &mut l), HetcdcStatus::Ok);
        assert_eq!(l, rational(3, 2));
        assert_eq!(hetcdc_simulate(p, 8, 1, &mut l), HetcdcStatus::Ok);
        assert_eq!(l, rational(3, 2));
        let mut json = ptr::null_mut();
        assert_eq!(hetcdc_placement_json(p, &mut json), HetcdcStatus::Ok);
        let doc = CStr::from_ptr(json).to_str().unwrap().to_owned();
        hetcdc_string_free(json);
        assert!(doc.contains("\"scale\": 2"));
        hetcdc_placement_free(p);
        hetcdc_config_free(cfg);
    }
}

#[test]
fn k4_lp_through_abi() {
    let cfg = config(&[6, 6, 6, 6], 12);
    let mut l = HetcdcRational::default();
    unsafe {
        assert_eq!(hetcdc_lp_optimum(cfg, &mut l), HetcdcStatus::Ok);
        assert_eq!(l, rational(12, 1));
        assert_eq!(hetcdc_optimal_load(cfg, &mut l), HetcdcStatus::BadDimension);
        hetcdc_config_free(cfg);
    }
}

#[test]
fn errors_and_null_handles() {
    let m = [1u64, 1, 1];
    let mut cfg = ptr::null_mut();
    unsafe {
        let s = hetcdc_config_new(m.as_ptr(), 3, 12, &mut cfg);
        assert_eq!(s, HetcdcStatus::FeasibilityViolation);
        assert!(cfg.is_null());
        let msg = CStr::from_ptr(hetcdc_last_error()).to_str().unwrap();
        assert!(msg.starts_with("FeasibilityViolation"), "{msg}");

        let mut l = HetcdcRational::default();
        assert_eq!(hetcdc_optimal_load(ptr::null(), &mut l), HetcdcStatus::NullPointer);
        assert_eq!(hetcdc_config_new(ptr::null(), 3, 3, &mut cfg), HetcdcStatus::NullPointer);

        let ok = config(&[3, 3, 3], 3);
        assert_eq!(hetcdc_optimal_load(ok, &mut l), HetcdcStatus::Ok);
        assert!(hetcdc_last_error().is_null());
        assert_eq!(hetcdc_oracle_min(ok, 1, &mut l), HetcdcStatus::BudgetExceeded);
        hetcdc_config_free(ok);
        hetcdc_config_free(ptr::null_mut());
        hetcdc_placement_free(ptr::null_mut());
        hetcdc_string_free(ptr::null_mut());
    }
}

#[test]
fn status_names() {
    let name = |c: i32| unsafe { CStr::from_ptr(hetcdc_status_name(c)).to_str().unwrap() };
    assert_eq!(name(HetcdcStatus::Ok as i32), "Ok");
    assert_eq!(name(HetcdcStatus::TooLarge as i32), "TooLarge");
    assert_eq!(name(HetcdcStatus::Panic as i32), "Panic");
    assert!(hetcdc_status_name(99).is_null());
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(crate_dir().join("include/hetcdc.h")).unwrap();
    for sym in [
        "typedef struct HetcdcConfig HetcdcConfig;",
        "typedef struct HetcdcPlacement HetcdcPlacement;",
        "HETCDC_STATUS_OK = 0",
        "HETCDC_STATUS_PANIC = 13",
        "hetcdc_config_new(",
        "hetcdc_config_free(",
        "hetcdc_optimal_load(",
        "hetcdc_classify_regime(",
        "hetcdc_lower_bounds(",
        "hetcdc_oracle_min(",
        "hetcdc_lp_optimum(",
        "hetcdc_placement_new(",
        "hetcdc_placement_json(",
        "hetcdc_simulate(",
        "hetcdc_string_free(",
        "hetcdc_last_error(",
        "hetcdc_status_name(",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

/// Compiles a C program against the generated header and static library.
/// Skipped when no C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("cc not found, skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libhetcdc_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("hetcdc_smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).contains("FeasibilityViolation"));
}
