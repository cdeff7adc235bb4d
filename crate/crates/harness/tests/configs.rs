use std::path::Path;

use tfactor_harness::config::ExperimentConfig;

#[test]
fn shipped_configs_are_canonical() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = std::fs::read_to_string(&path).unwrap();
            let cfg = ExperimentConfig::from_json(&text).unwrap();
            assert_eq!(cfg.to_json(), text, "{}", path.display());
            cfg.pattern.load(&dir).unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
