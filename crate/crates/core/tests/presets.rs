use std::path::PathBuf;

use rfm_core::presets::{file_stem, load_preset_file, render_preset_file, PRESET_PATH_VAR, SHIPPED};
use rfm_core::{classify, list_presets, preset, Error};

fn preset_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

#[test]
fn shipped_files_match_the_catalog() {
    for name in SHIPPED {
        let p = preset(name).unwrap();
        let file = preset_dir().join(format!("{}.rfm", file_stem(name)));
        let text = std::fs::read_to_string(&file).unwrap();
        assert_eq!(text, render_preset_file(&p), "{name} is stale");
        let loaded = load_preset_file(name, &file).unwrap();
        assert_eq!(loaded.descriptor, p.descriptor);
        assert_eq!(loaded.expected, p.expected);
    }
}

#[test]
fn every_shipped_preset_meets_its_oracle() {
    for name in SHIPPED {
        let p = preset(name).unwrap();
        let r = classify(&p.descriptor);
        assert_eq!(r.manifold.as_ref(), Some(&p.expected), "{name}: {:?}", r.rules());
        assert!(r.confidence >= Some(p.tier), "{name}");
    }
}

#[test]
fn argument_errors() {
    assert!(matches!(preset("nonesuch"), Err(Error::UnknownPreset(_))));
    assert!(matches!(preset("special_generic(3)"), Err(Error::Argument(_))));
    assert!(matches!(preset("special_generic(3,5)"), Err(Error::Argument(_))));
    assert!(matches!(preset("bott3(1,3)"), Err(Error::Hypothesis(_))));
    assert!(matches!(preset("so5_mod_so_k(1)"), Err(Error::NoConstruction(_))));
}

#[test]
fn search_path_supplies_extra_presets() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(preset_dir().join("cp3_over_s4.rfm")).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with("# expect")).map(|l| format!("{l}\n")).collect();
    std::fs::write(dir.path().join("my_cp3.rfm"), body).unwrap();
    unsafe { std::env::set_var(PRESET_PATH_VAR, dir.path()) };
    let p = preset("my_cp3").unwrap();
    assert_eq!(p.expected, preset("cp3_over_s4").unwrap().expected);
    assert_eq!(p.alias.as_deref(), Some("CP^3"));
    assert!(list_presets().iter().any(|(n, _)| n == "my_cp3"));
    std::env::remove_var(PRESET_PATH_VAR);
}
