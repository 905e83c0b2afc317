fn main() {
    std::process::exit(rdlab::cli::main_with_args(std::env::args_os()));
}
