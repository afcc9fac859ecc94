use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use wqsim_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { wqsim_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n < buf.len());
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn two_atoms() -> *mut WqsimConfig {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(wqsim_config_new(50.0, &mut cfg), WqsimStatus::Ok);
        assert_eq!(wqsim_config_add_atom(cfg, 0.1, 0.25, 0.5), WqsimStatus::Ok);
        assert_eq!(wqsim_config_add_atom(cfg, 0.2, 0.25, 0.5), WqsimStatus::Ok);
    }
    cfg
}

#[test]
fn classify_a_chiral_pair() {
    let cfg = two_atoms();
    let mut class = WqsimClass {
        label: WqsimLabel::Mixed,
        predicted_cee_sq: f64::NAN,
        outside_markov_regime: true,
    };
    unsafe {
        assert_eq!(wqsim_classify(cfg, &mut class), WqsimStatus::Ok);
        wqsim_config_free(cfg);
    }
    assert_eq!(class.label, WqsimLabel::TwoPhoton);
    assert_eq!(class.predicted_cee_sq, 0.0);
    assert!(!class.outside_markov_regime);
}

#[test]
fn trajectory_round_trip() {
    let cfg = two_atoms();
    let mut traj = ptr::null_mut();
    let (mut nodes, mut dim) = (0usize, 0usize);
    let (mut t, mut re, mut im) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(wqsim_solve_cee(cfg, 1.0, 0.0, &mut traj), WqsimStatus::Ok);
        assert_eq!(wqsim_trajectory_shape(traj, &mut nodes, &mut dim), WqsimStatus::Ok);
        assert_eq!(dim, 1);
        assert_eq!(nodes, 641);
        assert_eq!(
            wqsim_trajectory_node(traj, 0, 0, &mut t, &mut re, &mut im),
            WqsimStatus::Ok
        );
        assert_eq!((t, re, im), (0.0, 1.0, 0.0));
        assert_eq!(
            wqsim_trajectory_node(traj, nodes - 1, 0, &mut t, &mut re, &mut im),
            WqsimStatus::Ok
        );
        assert!((t - 1.0).abs() < 1e-12);
        let at_end = (re, im);
        assert_eq!(wqsim_trajectory_sample(traj, 1.0, 0, &mut re, &mut im), WqsimStatus::Ok);
        assert_eq!((re, im), at_end);
        assert_eq!(
            wqsim_trajectory_sample(traj, 2.0, 0, &mut re, &mut im),
            WqsimStatus::OutOfRange
        );
        assert_eq!(
            wqsim_trajectory_node(traj, nodes, 0, &mut t, &mut re, &mut im),
            WqsimStatus::OutOfRange
        );
        wqsim_trajectory_free(traj);
        wqsim_config_free(cfg);
    }
}

#[test]
fn single_excitation_has_one_component_per_atom() {
    let cfg = two_atoms();
    let mut traj = ptr::null_mut();
    let (mut nodes, mut dim) = (0usize, 0usize);
    unsafe {
        assert_eq!(wqsim_solve_single_excitation(cfg, 0.5, 0.0, &mut traj), WqsimStatus::Ok);
        assert_eq!(wqsim_trajectory_shape(traj, &mut nodes, &mut dim), WqsimStatus::Ok);
        wqsim_trajectory_free(traj);
        wqsim_config_free(cfg);
    }
    assert_eq!(dim, 2);
}

#[test]
fn errors_map_to_codes_and_messages() {
    let cfg = two_atoms();
    let mut traj = ptr::null_mut();
    unsafe {
        // a third atom is rejected and the handle keeps its two atoms
        assert_eq!(wqsim_config_add_atom(cfg, 0.3, 0.1, 0.1), WqsimStatus::InvalidGeometry);
        assert!(last_error().contains("one or two atoms"));
        let mut n = 0usize;
        assert_eq!(wqsim_config_atom_count(cfg, &mut n), WqsimStatus::Ok);
        assert_eq!(n, 2);

        // c_ee only feels the round trips 2 z1 and 2 z2
        assert_eq!(wqsim_solve_cee(cfg, 1.0, 0.05, &mut traj), WqsimStatus::StepTooLarge);
        assert!(last_error().contains("bound 0.025"), "{}", last_error());
        assert!(traj.is_null());

        assert_eq!(wqsim_classify(ptr::null(), ptr::null_mut()), WqsimStatus::NullPointer);
        assert_eq!(
            wqsim_config_from_preset(c"fig9".as_ptr(), &mut ptr::null_mut()),
            WqsimStatus::UnknownPreset
        );
        wqsim_config_free(cfg);
        wqsim_config_free(ptr::null_mut());
    }
}

#[test]
fn preset_and_file_configs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[atom.1]\nz = 0.1\ngamma_l = 0.1\ngamma_r = 0.1\n").unwrap();
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(
            wqsim_config_from_file(c_path.as_ptr(), &mut cfg),
            WqsimStatus::ParseError
        );
        assert!(last_error().contains("omega_a"));
        assert_eq!(wqsim_config_from_preset(c"fig3".as_ptr(), &mut cfg), WqsimStatus::Ok);
        let mut class = WqsimClass {
            label: WqsimLabel::Mixed,
            predicted_cee_sq: 0.0,
            outside_markov_regime: false,
        };
        assert_eq!(wqsim_classify(cfg, &mut class), WqsimStatus::Ok);
        assert_eq!(class.label, WqsimLabel::OnePhotonTrapped);
        wqsim_config_free(cfg);
    }
}

#[test]
fn simulate_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("one.toml");
    std::fs::write(
        &cfg_path,
        "omega_a = 50\n[atom.1]\nz = 0.1\ngamma_l = 0.2\ngamma_r = 0.2\n[run]\nt_end = 0.5\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let c_cfg = CString::new(cfg_path.to_str().unwrap()).unwrap();
    let c_out = CString::new(out.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { wqsim_simulate(c_cfg.as_ptr(), c_out.as_ptr()) },
        WqsimStatus::Ok
    );
    assert!(out.join("manifest.toml").exists());
    assert!(out.join("atoms.csv").exists());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(wqsim_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/wqsim.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "wqsim_version",
        "wqsim_last_error",
        "wqsim_config_new",
        "wqsim_config_add_atom",
        "wqsim_config_from_file",
        "wqsim_config_from_preset",
        "wqsim_config_free",
        "wqsim_classify",
        "wqsim_solve_cee",
        "wqsim_solve_single_excitation",
        "wqsim_trajectory_node",
        "wqsim_trajectory_sample",
        "wqsim_trajectory_free",
        "wqsim_run_preset",
        "wqsim_simulate",
        "typedef struct WqsimConfig WqsimConfig;",
        "WQSIM_STATUS_STEP_TOO_LARGE = 7",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include "wqsim.h"

int main(void) {
    WqsimConfig *cfg = NULL;
    if (wqsim_config_new(50.0, &cfg) != WQSIM_STATUS_OK) return 1;
    if (wqsim_config_add_atom(cfg, 0.0628318530717958, 0.2, 0.2) != WQSIM_STATUS_OK) return 2;
    WqsimTrajectory *tr = NULL;
    if (wqsim_solve_cee(cfg, 0.0, 0.0, &tr) != WQSIM_STATUS_OK) return 3;
    size_t nodes = 0, dim = 0;
    wqsim_trajectory_shape(tr, &nodes, &dim);
    double t, re, im;
    wqsim_trajectory_node(tr, nodes - 1, 0, &t, &re, &im);
    printf("%zu %.6f %.6f\n", nodes, t, re * re + im * im);
    if (wqsim_solve_cee(cfg, 1.0, 1.0, &tr) != WQSIM_STATUS_STEP_TOO_LARGE) return 4;
    char msg[128];
    wqsim_last_error(msg, sizeof msg);
    printf("%s\n", msg);
    wqsim_trajectory_free(tr);
    wqsim_config_free(cfg);
    return 0;
}
"#;

/// Builds a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler on PATH; C link test not run");
        return;
    }
    let target_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = target_dir.join("libwqsim_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    let fields: Vec<&str> = lines.next().unwrap().split(' ').collect();
    assert_eq!(fields[0], "1281");
    let pop: f64 = fields[2].parse().unwrap();
    // an atom at a node keeps most of its excitation
    assert!(pop > 0.95, "{stdout}");
    assert!(lines.next().unwrap().contains("exceeds the bound"));
}
