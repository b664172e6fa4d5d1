fn main() {
    std::process::exit(dfa_core::cli::main_with_args(std::env::args_os()));
}
