fn main() {
    std::process::exit(hytsl::cli::main_with_args(std::env::args_os()));
}
