fn main() {
    std::process::exit(cotap::cli::main_with_args(std::env::args_os()));
}
