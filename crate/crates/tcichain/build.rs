fn main() {
    // Symmetric/Hermitian eigensolves go straight to LAPACK; OpenBLAS ships
    // the full LAPACK symbol set on this platform.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
