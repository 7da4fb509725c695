fn main() {
    std::process::exit(fracvar::cli::main_with_args(std::env::args_os()));
}
