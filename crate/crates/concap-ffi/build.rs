use std::path::PathBuf;

fn main() {
    // Regenerate the committed C header when cbindgen can run; the committed
    // copy keeps downstream builds working if generation is unavailable.
    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include/concap.h");
    let mut config = cbindgen::Config::default();
    config.language = cbindgen::Language::C;
    config.include_guard = Some("CONCAP_H".into());
    config.cpp_compat = true;
    // C has a flat namespace: ConcapStatus_Ok instead of a bare Ok
    config.enumeration.prefix_with_name = true;
    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(&header);
        }
        Err(e) => {
            println!("cargo:warning=cbindgen failed ({e}); using committed header");
        }
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
}
