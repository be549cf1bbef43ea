use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn header() -> String {
    fs::read_to_string(crate_dir().join("include/holonomic.h"))
        .expect("header generated by build.rs")
}

fn exported_symbols() -> Vec<String> {
    let src = fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    src.lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap().trim().to_owned())
        .collect()
}

#[test]
fn header_declares_every_export() {
    let h = header();
    let symbols = exported_symbols();
    assert!(symbols.len() >= 15, "found {symbols:?}");
    for s in symbols {
        assert!(h.contains(&format!("{s}(")), "{s} missing from header");
    }
}

#[test]
fn header_has_types_and_status_codes() {
    let h = header();
    for needle in [
        "#ifndef HOLONOMIC_H",
        "typedef struct HgEvolutionReport HgEvolutionReport;",
        "typedef struct HgSynthesisResult HgSynthesisResult;",
        "HG_STATUS_OK = 0",
        "HG_STATUS_NULL_POINTER = 1",
        "HG_STATUS_PANIC = 8",
        "double re[4];",
        "extern \"C\"",
    ] {
        assert!(h.contains(needle), "header lacks `{needle}`");
    }
}

const SMOKE: &str = r#"
#include <stdio.h>
#include <math.h>
#include "holonomic.h"

int main(void) {
    HgMatrix2 u, not_gate;
    double betas[4] = {0.423, 0.680, 0.236, 0.222};
    double mag, ps;
    if (hg_compose(betas, 4, &u) != HG_STATUS_OK) return 10;
    if (hg_named_gate(HG_NAMED_GATE_NOT, &not_gate) != HG_STATUS_OK) return 11;
    if (hg_fidelity(&u, &not_gate, &mag, &ps) != HG_STATUS_OK) return 12;
    if (mag < 1.0 - 1e-5) return 13;
    if (hg_analytic_gate(3.0, 1.0, &u) != HG_STATUS_OUT_OF_RANGE) return 14;
    if (hg_last_error_message()[0] == '\0') return 15;

    HgDriveParams p;
    HgEvolutionReport *report = NULL;
    double gp, gm;
    hg_params_from_beta(0.5, 1.0, &p);
    if (hg_evolution_report_new(&p, 2000, &report) != HG_STATUS_OK) return 16;
    hg_evolution_report_branches(report, HG_BRANCH_QUANTITY_GAMMA_DYNAMICAL, &gp, &gm);
    hg_evolution_report_free(report);
    if (fabs(gp) > 1e-8 || fabs(gm) > 1e-8) return 17;
    printf("ok %s\n", hg_version());
    return 0;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/<test-binary> -> target/<profile>
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libholonomic_ffi.a");
    lib.exists().then_some(lib)
}

fn compiler() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| {
            Command::new(c)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .map(str::to_owned)
}

#[test]
fn c_program_links_and_runs() {
    let (Some(lib), Some(cc)) = (static_lib(), compiler()) else {
        eprintln!("skipping: no C compiler or static library available");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    fs::write(&src, SMOKE).unwrap();
    let include: &Path = &crate_dir().join("include");
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(include)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "smoke exited with {:?}",
        out.status
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
