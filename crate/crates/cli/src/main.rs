fn main() {
    std::process::exit(crofton_cli::run(std::env::args_os()));
}
