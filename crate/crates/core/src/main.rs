fn main() {
    std::process::exit(diskchaos::cli::run(std::env::args_os()));
}
