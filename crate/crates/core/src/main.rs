fn main() {
    std::process::exit(regime_swk::cli::run(std::env::args_os()));
}
