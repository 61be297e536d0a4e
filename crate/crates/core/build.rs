fn main() {
    // LAPACK comes from the system (liblapack / OpenBLAS); `lapack` only ships bindings.
    println!("cargo:rustc-link-lib=lapack");
}
