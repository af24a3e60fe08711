fn main() {
    // The `lapack` crate only declares the FFI signatures; the symbols are
    // provided by the system OpenBLAS (which bundles BLAS + LAPACK).
    println!("cargo:rustc-link-lib=dylib=openblas");
}
