use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dnspectral::cli::{parse_config, BasisTerm, Family, FunctionDescriptor, Mode, RunConfig};
use proptest::prelude::*;

const BIN: &str = env!("CARGO_BIN_EXE_dnspectral");

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn dnspectral(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).output().unwrap()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn bundled_scenarios_succeed() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, mode) in [
        ("forward_heat.json", "forward"),
        ("forward_fractional.json", "forward"),
        ("backward_roundtrip.json", "backward"),
        ("verify_fractional.json", "verify"),
    ] {
        let out = tmp.path().join(name);
        let o = dnspectral(
            &[mode, "--config", scenario(name).to_str().unwrap(), "--output", out.to_str().unwrap()],
            tmp.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let r = report(&out);
        assert_eq!(r["pass"], true, "{name}");
        assert!(out.join("u.csv").exists() && out.join("coeffs.csv").exists(), "{name}");
    }
    let heat = report(&tmp.path().join("forward_heat.json"));
    assert_eq!(heat["oracle"]["pass"], true);
    assert!(heat["oracle"]["linf"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn backward_outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let config = scenario("backward_roundtrip.json");
    let run = |dir: &str, threads: &str| {
        let out = tmp.path().join(dir);
        let o = Command::new(BIN)
            .args(["backward", "--config", config.to_str().unwrap(), "--output", out.to_str().unwrap()])
            .env("DNSPECTRAL_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b, c) = (run("a", "4"), run("b", "4"), run("c", "1"));
    for file in ["u.csv", "coeffs.csv"] {
        let first = std::fs::read(a.join(file)).unwrap();
        assert_eq!(first, std::fs::read(b.join(file)).unwrap(), "{file}");
        assert_eq!(first, std::fs::read(c.join(file)).unwrap(), "{file} with one thread");
    }
}

#[test]
fn selftest_exits_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dnspectral(&["selftest"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = tmp.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let syntax = write("syntax.json", "{\"mode\": \"forward\",\n \"alpha0\": }");
    assert_eq!(dnspectral(&["forward", "--config", &syntax], tmp.path()).status.code(), Some(3));
    let invalid = write("invalid.json", r#"{"mode": "forward", "alpha0": 1.5, "alpha1": 0.8, "T": 1}"#);
    let o = dnspectral(&["forward", "--config", &invalid], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("alpha0") && stderr.contains("phi_spec"), "{stderr}");
    assert_eq!(dnspectral(&["forward", "--config", "missing.json"], tmp.path()).status.code(), Some(1));
    assert_eq!(dnspectral(&["sideways"], tmp.path()).status.code(), Some(3));
    assert_eq!(dnspectral(&["--help"], tmp.path()).status.code(), Some(0));
    let incompatible = write(
        "incompatible.json",
        r#"{"mode": "forward", "alpha0": 0.9, "alpha1": 0.8, "T": 1, "N": 8, "nx": 65, "nt": 16,
            "phi": {"kind": "expression", "payload": "x"}}"#,
    );
    assert_eq!(dnspectral(&["forward", "--config", &incompatible], tmp.path()).status.code(), Some(4));
    assert_eq!(
        dnspectral(&["forward", "--config", &incompatible, "--allow-incompatible"], tmp.path()).status.code(),
        Some(0)
    );
    let strict = write(
        "strict.json",
        r#"{"mode": "verify", "alpha0": 0.7, "alpha1": 0.7, "T": 1, "N": 8, "nx": 65, "nt": 64,
            "phi": {"kind": "expression", "payload": "sin(2*pi*x)"}, "tolerances": {"pde": 1e-9, "verify_steps": 256}}"#,
    );
    assert_eq!(dnspectral(&["verify", "--config", &strict], tmp.path()).status.code(), Some(2));
    let o = Command::new(BIN).args(["selftest"]).env("DNSPECTRAL_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

fn descriptor() -> impl Strategy<Value = Option<FunctionDescriptor>> {
    prop_oneof![
        Just(None),
        Just(Some(FunctionDescriptor::Expression("sin(2*pi*x)".into()))),
        (0usize..20, -5.0f64..5.0).prop_map(|(k, scale)| Some(FunctionDescriptor::Basis(BasisTerm {
            family: if k == 0 { Family::Root } else { Family::Cosine },
            k,
            scale
        }))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_round_trips(
        a0 in 0.05f64..=1.0, a1 in 0.05f64..=1.0, horizon in 1e-3f64..1e3,
        n in 1usize..64, nx in 8usize..2000, nt in 8usize..4000,
        phi in descriptor(), f in descriptor(), cutoff in proptest::option::of(1.0f64..1e8),
        pde in 1e-8f64..1.0,
    ) {
        let mut c = RunConfig::new(Mode::Forward);
        (c.alpha0, c.alpha1, c.horizon, c.n_modes, c.nx, c.nt) = (a0, a1, horizon, n, nx, nt);
        c.phi_spec = phi.or(Some(FunctionDescriptor::Expression("x*(1-x)".into())));
        c.f_spec = f;
        c.cutoff_amplification = cutoff;
        c.tolerances.pde = pde;
        let text = c.to_json();
        match parse_config(&text) {
            Ok(back) => prop_assert_eq!(back, c),
            // Semantic violations are reported, but never for a faithful copy of valid input.
            Err(e) => prop_assert!(!c.violations().is_empty(), "{}", e),
        }
    }
}
