use std::ffi::{c_char, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use swanson_ffi::*;

const JONES: SwansonParams = SwansonParams { omega: 2.0, alpha: 0.4, beta: 0.2 };

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let len = unsafe { swanson_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf.iter().take(len.min(255)).map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn harmonic() -> *mut SwansonProfile {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { swanson_profile_harmonic(&mut p) }, SwansonStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn lowest_levels_match_scaled_oscillator() {
    let p = harmonic();
    let grid = SwansonGrid { x_min: -10.0, x_max: 10.0, n: 2000 };
    let mut out = [0.0; 5];
    let status = unsafe { swanson_lowest_eigenvalues(p, JONES, grid, 5, out.as_mut_ptr(), out.len()) };
    assert_eq!(status, SwansonStatus::Ok);
    let root = (4.0f64 - 4.0 * 0.4 * 0.2).sqrt();
    for (n, e) in out.iter().enumerate() {
        let exact = (n as f64 + 0.5) * root;
        assert!(((e - exact) / exact).abs() < 1e-4, "level {n}: {e} vs {exact}");
    }
    let mut closed = 0.0;
    assert_eq!(unsafe { swanson_harmonic_energy(JONES, 2, &mut closed) }, SwansonStatus::Ok);
    assert!((closed - 2.5 * root).abs() < 1e-14);
    unsafe { swanson_profile_free(p) };
}

#[test]
fn coefficients_and_metric() {
    let p = harmonic();
    let mut c = SwansonCoefficients::default();
    assert_eq!(unsafe { swanson_coefficients(p, JONES, 1.5, &mut c) }, SwansonStatus::Ok);
    // Jones mapping exp(-(α-β)x²/(2ω̃)) with ω̃ = 1.4
    let rho = (-0.2f64 * 1.5 * 1.5 / 2.8).exp();
    assert!((c.rho_tilde - rho).abs() < 1e-14);
    assert!((c.zeta_plus - rho * rho).abs() < 1e-14);
    assert!((c.commutator - 1.0).abs() < 1e-14);
    unsafe { swanson_profile_free(p) };
}

#[test]
fn oracle_spectrum_is_real() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { swanson_profile_solitonic(1.0, 2.0, &mut p) }, SwansonStatus::Ok);
    let params = SwansonParams { omega: 1.0, alpha: 0.1, beta: 0.0 };
    let l = 7.6f64.acosh();
    let grid = SwansonGrid { x_min: -l, x_max: l, n: 200 };
    let (mut im, mut norm) = (f64::NAN, f64::NAN);
    assert_eq!(unsafe { swanson_oracle_max_imag(p, params, grid, &mut im, &mut norm) }, SwansonStatus::Ok);
    assert!(norm > 0.0 && im <= 1e-8 * norm, "{im} vs {norm}");
    let mut e0 = 0.0;
    assert_eq!(unsafe { swanson_solitonic_energy(1.0, 2.0, params, 0, &mut e0) }, SwansonStatus::Ok);
    // ground level is ξ = ½(ω̃ + α) = ½ω on the β = 0 branch
    assert!((e0 - 0.5).abs() < 1e-12, "{e0}");
    unsafe { swanson_profile_free(p) };
}

#[test]
fn error_paths() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { swanson_profile_solitonic(-1.0, 2.0, &mut p) }, SwansonStatus::InvalidArgument);
    assert!(p.is_null());
    assert!(last_error().contains("q"));

    assert_eq!(unsafe { swanson_profile_harmonic(ptr::null_mut()) }, SwansonStatus::NullPointer);
    assert!(last_error().contains("out"));

    let a = CString::new("cosh(x").unwrap();
    let b = CString::new("x").unwrap();
    assert_eq!(unsafe { swanson_profile_custom(a.as_ptr(), b.as_ptr(), &mut p) }, SwansonStatus::InvalidArgument);
    assert!(last_error().contains("expression"));

    let h = harmonic();
    assert_eq!(unsafe { swanson_last_error(ptr::null_mut(), 0) }, 0);
    let broken = SwansonParams { omega: 0.5, alpha: 0.4, beta: 0.2 };
    let mut c = SwansonCoefficients::default();
    assert_eq!(unsafe { swanson_coefficients(h, broken, 0.0, &mut c) }, SwansonStatus::InvalidArgument);
    assert!(last_error().contains("omega_tilde"));

    let grid = SwansonGrid { x_min: -5.0, x_max: 5.0, n: 100 };
    let mut out = [0.0; 2];
    let status = unsafe { swanson_lowest_eigenvalues(h, JONES, grid, 3, out.as_mut_ptr(), out.len()) };
    assert_eq!(status, SwansonStatus::BufferTooSmall);
    let status = unsafe { swanson_lowest_eigenvalues(ptr::null(), JONES, grid, 1, out.as_mut_ptr(), 2) };
    assert_eq!(status, SwansonStatus::NullPointer);
    let (mut im, mut norm) = (0.0, 0.0);
    let big = SwansonGrid { x_min: -5.0, x_max: 5.0, n: 1000 };
    assert_eq!(unsafe { swanson_oracle_max_imag(h, JONES, big, &mut im, &mut norm) }, SwansonStatus::InvalidArgument);
    unsafe { swanson_profile_free(h) };
    unsafe { swanson_profile_free(ptr::null_mut()) };
}

#[test]
fn canonical_profile_restores_unit_commutator() {
    let mut p = ptr::null_mut();
    let a = CString::new("1 + 0.5*tanh(x)^2").unwrap();
    assert_eq!(unsafe { swanson_profile_canonical(a.as_ptr(), 0.2, &mut p) }, SwansonStatus::Ok);
    let params = SwansonParams { omega: 1.0, alpha: 0.1, beta: 0.05 };
    for x in [-1.3, 0.0, 0.7] {
        let mut c = SwansonCoefficients::default();
        assert_eq!(unsafe { swanson_coefficients(p, params, x, &mut c) }, SwansonStatus::Ok);
        assert!((c.commutator - 1.0).abs() < 1e-9, "{}", c.commutator);
    }
    unsafe { swanson_profile_free(p) };
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_abi() {
    let header = std::fs::read_to_string(crate_dir().join("include/swanson.h")).unwrap();
    for name in [
        "typedef struct SwansonProfile SwansonProfile;",
        "SWANSON_STATUS_BUFFER_TOO_SMALL = 4",
        "swanson_profile_harmonic",
        "swanson_profile_solitonic",
        "swanson_profile_morse",
        "swanson_profile_canonical",
        "swanson_profile_custom",
        "swanson_profile_free",
        "swanson_coefficients",
        "swanson_lowest_eigenvalues",
        "swanson_oracle_max_imag",
        "swanson_solitonic_energy",
        "swanson_harmonic_energy",
        "swanson_last_error",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "swanson.h"

int main(void) {
    SwansonProfile *p = NULL;
    if (swanson_profile_harmonic(&p) != SWANSON_STATUS_OK) return 10;
    SwansonParams params = {2.0, 0.4, 0.2};
    SwansonGrid grid = {-10.0, 10.0, 2000};
    double e[3];
    if (swanson_lowest_eigenvalues(p, params, grid, 3, e, 3) != SWANSON_STATUS_OK) return 11;
    double root = sqrt(4.0 - 4.0 * 0.4 * 0.2);
    for (int n = 0; n < 3; ++n) {
        double exact = (n + 0.5) * root;
        if (fabs(e[n] - exact) / exact > 1e-4) return 12;
    }
    SwansonParams broken = {0.5, 0.4, 0.2};
    SwansonCoefficients c;
    if (swanson_coefficients(p, broken, 0.0, &c) != SWANSON_STATUS_INVALID_ARGUMENT) return 13;
    char msg[256];
    if (swanson_last_error(msg, sizeof msg) == 0) return 14;
    swanson_profile_free(p);
    printf("%.10f\n", e[0]);
    return 0;
}
"#;

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_against_staticlib() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libswanson_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("swanson_smoke.c");
    let bin = tmp.join("swanson_smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let e0: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((e0 - 0.5 * (4.0f64 - 0.32).sqrt()).abs() < 1e-3);
}
