// Link the system OpenBLAS (which bundles LAPACK) for the `ndarray`
// BLAS backend and the `ndarray-linalg` LAPACK bindings.
fn main() {
    println!("cargo:rustc-link-lib=dylib=openblas");
}
