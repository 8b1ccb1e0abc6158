use std::path::Path;
use std::process::Command;

const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/tracelab.h");

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(HEADER).unwrap();
    let source = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 10);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let cc = ["cc", "c++"];
    for (compiler, lang) in cc.iter().zip(["c", "c++"]) {
        if Command::new(compiler).arg("--version").output().is_err() {
            eprintln!("{compiler} not available, skipping");
            continue;
        }
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(Path::new(HEADER))
            .status()
            .unwrap();
        assert!(status.success(), "{compiler} rejected the header");
    }
}
