fn main() {
    std::process::exit(onebit_ci::cli::main_with_args(std::env::args_os()));
}
