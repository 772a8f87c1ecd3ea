fn main() {
    std::process::exit(conestab::cli::main_with_args(std::env::args_os()));
}
