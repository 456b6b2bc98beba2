fn main() {
    std::process::exit(unipulse_cli::main_with(std::env::args_os()));
}
