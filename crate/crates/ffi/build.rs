fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file("cbindgen.toml").expect("cbindgen.toml");
    cbindgen::generate_with_config(".", config)
        .expect("unable to generate C bindings")
        .write_to_file("include/qei.h");
}
