//! Compiles and runs a small C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "gpvortex.h"

int main(void) {
    GpvPade *p = NULL;
    if (gpv_pade_new(4, &p) != GPV_STATUS_OK) return 1;
    double rho = 0.0;
    if (gpv_pade_eval(p, 3.0, &rho, NULL) != GPV_STATUS_OK) return 2;
    gpv_pade_free(p);
    if (!(rho > 0.8 && rho < 1.0)) return 3;
    if (gpv_pade_new(9, &p) != GPV_STATUS_INVALID_ARGUMENT) return 4;
    char msg[128];
    size_t n = gpv_last_error(msg, sizeof msg);
    if (n == 0 || strlen(msg) == 0) return 5;
    printf("%s %.6f\n", gpv_version(), rho);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    // Test builds only produce the rlib; build the static library with the same profile.
    let profile = if profile_dir.ends_with("release") { "release" } else { "test" };
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let built = Command::new(cargo)
        .args(["build", "--quiet", "-p", "gpvortex-ffi", "--lib", "--profile", profile])
        .current_dir(&crate_dir)
        .status()
        .expect("cargo runs");
    assert!(built.success());
    let lib = profile_dir.join("libgpvortex_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("gpv_smoke.c");
    let exe = tmp.join("gpv_smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")), "{text}");
}
