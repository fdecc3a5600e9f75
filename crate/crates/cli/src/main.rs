fn main() {
    std::process::exit(thetaring_cli::main_with_args(std::env::args_os()));
}
