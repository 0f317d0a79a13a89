fn main() {
    std::process::exit(stgirm::cli::main_with_args(std::env::args_os()));
}
