fn main() {
    std::process::exit(cnotsim_core::cli::run_from(std::env::args_os()));
}
