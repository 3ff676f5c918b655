use std::env;
use std::fs;
use std::path::PathBuf;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let out_path = PathBuf::from(env::var("OUT_DIR").unwrap());
    const HEADER_NAME: &str = "wordeq.h";

    let config = cbindgen::Config::from_root_or_default(&crate_dir);

    match cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
    {
        Ok(bindings) => {
            bindings.write_to_file(out_path.join(HEADER_NAME));
            fs::create_dir_all(PathBuf::from(&crate_dir).join("include")).unwrap();
            fs::copy(
                out_path.join(HEADER_NAME),
                PathBuf::from(&crate_dir).join("include").join(HEADER_NAME),
            )
            .unwrap();
        }
        Err(e) => {
            // keep the committed header usable when cbindgen cannot run
            println!("cargo:warning=cbindgen failed: {e}");
        }
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
