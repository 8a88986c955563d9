fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("manifest dir");
    let header = std::path::Path::new(&crate_dir).join("include/cournot.h");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(header);
        }
        Err(cbindgen::Error::ParseSyntaxError { .. }) => {
            // Let rustc report the syntax error with a real diagnostic.
        }
        Err(e) => panic!("header generation failed: {e}"),
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
