fn main() {
    std::process::exit(quartic_nls_cli::run(std::env::args_os()));
}
