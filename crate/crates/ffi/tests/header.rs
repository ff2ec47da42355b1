use std::path::{Path, PathBuf};
use std::process::Command;

const EXPORTS: &[&str] = &[
    "mflab_last_error_message",
    "mflab_version",
    "mflab_proportion_new",
    "mflab_proportion_free",
    "mflab_proportion_set",
    "mflab_proportion_get",
    "mflab_proportion_len",
    "mflab_proportion_to_json",
    "mflab_proportion_from_json",
    "mflab_string_free",
    "mflab_rho_distance",
    "mflab_total_variation",
    "mflab_jsq_stationary",
    "mflab_meanfield_fixed_point",
    "mflab_ring_new",
    "mflab_ring_free",
    "mflab_ring_run",
    "mflab_ring_time",
    "mflab_ring_queues",
    "mflab_ring_proportion",
];

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mflab.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in EXPORTS {
        let declared = text.contains(&format!(" {name}(")) || text.contains(&format!("*{name}("));
        assert!(declared, "{name} missing from header");
    }
    assert!(text.contains("typedef struct MflabProportion MflabProportion;"));
    assert!(text.contains("typedef struct MflabRing MflabRing;"));
    assert!(text.contains("MFLAB_STATUS_OK = 0"));
}

#[test]
fn every_export_is_in_the_source() {
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exported = src.matches("#[no_mangle]").count();
    assert_eq!(exported, EXPORTS.len());
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include "mflab.h"

int main(void) {
    MflabProportion *p = NULL, *q = NULL;
    double rho = -1.0, residual = -1.0;
    if (mflab_jsq_stationary(1, 0.5, 1.0, 20, &p, &residual) != MFLAB_STATUS_OK) return 1;
    if (mflab_meanfield_fixed_point(1, 0.5, 1.0, 20, 1e-11, &q, NULL) != MFLAB_STATUS_OK) return 2;
    if (mflab_rho_distance(p, q, &rho) != MFLAB_STATUS_OK) return 3;
    if (mflab_jsq_stationary(1, 2.0, 1.0, 20, &q, NULL) != MFLAB_STATUS_UNSTABLE) return 4;
    if (mflab_last_error_message() == NULL) return 5;
    MflabRing *r = NULL;
    unsigned q4[4];
    if (mflab_ring_new(4, 1, 0.5, 1.0, 1, 0, &r) != MFLAB_STATUS_OK) return 6;
    if (mflab_ring_run(r, 10.0) != MFLAB_STATUS_OK) return 7;
    if (mflab_ring_queues(r, q4, 4) != MFLAB_STATUS_OK) return 8;
    printf("%s %.3e %.3e\n", mflab_version(), rho, residual);
    mflab_ring_free(r);
    mflab_proportion_free(p);
    mflab_proportion_free(q);
    return rho < 1e-8 ? 0 : 9;
}
"#;

/// Builds and runs a C program against the header and the static library
/// cargo placed next to this test's deps directory.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libmflab_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap_or_else(|e| panic!("cannot run {cc}: {e}"));
    assert!(status.success(), "C build failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with(env!("CARGO_PKG_VERSION")));
}
