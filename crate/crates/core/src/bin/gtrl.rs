fn main() {
    std::process::exit(gtrl::cli::main_with_args(std::env::args_os()));
}
