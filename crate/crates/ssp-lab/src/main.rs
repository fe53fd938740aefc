fn main() {
    std::process::exit(ssp_lab::cli::run_from_env());
}
