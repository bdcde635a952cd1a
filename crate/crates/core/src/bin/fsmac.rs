fn main() {
    std::process::exit(fsmac::cli::run(std::env::args_os()));
}
