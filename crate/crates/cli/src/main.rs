fn main() {
    std::process::exit(annulus_cli::main_with_args(std::env::args_os()));
}
