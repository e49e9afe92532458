fn main() {
    std::process::exit(zkcyl::cli::main_with_args(std::env::args_os()));
}
