fn main() {
    std::process::exit(sensesim::cli::main_with_args(std::env::args_os()));
}
