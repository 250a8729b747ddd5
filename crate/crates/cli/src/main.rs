fn main() {
    std::process::exit(lagrem_cli::app::run_cli(std::env::args_os()));
}
