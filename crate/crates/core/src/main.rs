fn main() {
    std::process::exit(editwar::cli::run_cli(std::env::args_os()));
}
