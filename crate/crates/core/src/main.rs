fn main() {
    std::process::exit(jordan_ext::cli::main_with_args(std::env::args_os()));
}
