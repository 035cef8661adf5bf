fn main() {
    std::process::exit(engagement::cli::run(std::env::args_os()));
}
