fn main() {
    std::process::exit(andor::cli::run(std::env::args_os()));
}
