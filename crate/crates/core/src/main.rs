fn main() {
    std::process::exit(pseudoboson::cli::main_with_args(std::env::args_os()));
}
