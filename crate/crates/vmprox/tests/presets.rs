//! The shipped preset sweeps must stay loadable and internally consistent.

use std::path::PathBuf;

use vmprox::config::load_specs;

fn preset_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

#[test]
fn all_presets_load_and_lower() {
    let dir = preset_dir();
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        seen += 1;
        let specs = load_specs(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!specs.is_empty());
        let first = &specs[0];
        for spec in &specs {
            // Shared-dataset precondition of the compare command.
            assert_eq!(spec.dataset, first.dataset, "{}", path.display());
            assert_eq!(spec.lambda1, first.lambda1);
            assert_eq!(spec.lambda2, first.lambda2);
            // Every spec validates against a plausible sample count.
            spec.to_solver_config(10_000)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
    assert_eq!(seen, 12, "expected the full preset set");
}
