fn main() {
    std::process::exit(lmse::cli::main_with_args(std::env::args_os()));
}
