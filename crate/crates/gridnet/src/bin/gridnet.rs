fn main() {
    std::process::exit(gridnet::cli::main_with_args(std::env::args_os()));
}
