//! Compiles the generated header and a small C program against it.

use std::path::{Path, PathBuf};
use std::process::Command;

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_is_current_and_declares_the_api() {
    let text = std::fs::read_to_string(include_dir().join("refpref.h")).unwrap();
    for name in [
        "rp_group_new",
        "rp_group_free",
        "rp_group_is_coercive",
        "rp_decompose",
        "rp_value",
        "rp_min_matrix",
        "rp_demand_direct",
        "rp_demand_closed_form",
        "rp_satisfaction",
        "rp_economy_new",
        "rp_economy_add_agent",
        "rp_economy_free",
        "rp_excess_demand",
        "rp_tatonnement",
        "rp_status_message",
        "rp_last_error",
        "RP_STATUS_NOT_COERCIVE",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let program = r#"
#include "refpref.h"
int main(void) {
    RpGroup *g = NULL;
    const double a[2] = {1.0, -1.0};
    RpStatus st = rp_group_new(2, a, &g);
    rp_group_free(g);
    return st == RP_STATUS_OK ? 0 : 1;
}
"#;
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, program).unwrap();
    for (compiler, extra) in [("cc", &["-std=c99"][..]), ("c++", &["-x", "c++"][..])] {
        let status = Command::new(compiler)
            .args(extra)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(include_dir())
            .arg(&src)
            .status()
            .unwrap_or_else(|e| panic!("running {compiler}: {e}"));
        assert!(status.success(), "{compiler} rejected the header");
    }
}

/// `target/<profile>`, two levels above this test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = profile_dir().join("librefpref_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let program = r#"
#include <math.h>
#include <stdio.h>
#include "refpref.h"
int main(void) {
    RpGroup *g = NULL;
    const double a[2] = {1.0, -1.0};
    const double p[2] = {0.25, 0.75};
    const double r[2] = {2.0, 1.0};
    double x[2], v;
    if (rp_group_new(2, a, &g) != RP_STATUS_OK) return 1;
    if (rp_demand_direct(g, p, 200.0, r, x, &v, NULL) != RP_STATUS_OK) return 2;
    rp_group_free(g);
    if (fabs(x[0] - 400.0) > 1e-7 || fabs(x[1] - 400.0 / 3.0) > 1e-7) return 3;
    if (rp_group_new(2, (const double[]){1.0, 1.0}, &g) != RP_STATUS_SINGULAR_GROUP) return 4;
    printf("%.9f %.9f %.9f\n", x[0], x[1], v);
    return 0;
}
"#;
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("demo.c");
    let bin = dir.path().join("demo");
    std::fs::write(&src, program).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(include_dir())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "400.000000000 133.333333333 163.299316186"
    );
}
