fn main() {
    std::process::exit(batswarm_cli::run_cli(std::env::args_os()));
}
