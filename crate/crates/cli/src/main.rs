fn main() {
    std::process::exit(ng_cli::run(std::env::args_os()));
}
