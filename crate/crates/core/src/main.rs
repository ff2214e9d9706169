fn main() {
    std::process::exit(brems::cli::main_with_args(std::env::args_os()));
}
