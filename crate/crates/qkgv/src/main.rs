fn main() {
    std::process::exit(qkgv::cli::run_from_env());
}
