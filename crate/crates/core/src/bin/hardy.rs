fn main() {
    std::process::exit(hardy_moments::cli::run(std::env::args_os()));
}
