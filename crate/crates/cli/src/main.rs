fn main() {
    std::process::exit(tcross_cli::run(std::env::args_os()));
}
