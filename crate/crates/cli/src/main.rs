fn main() {
    std::process::exit(missmass_cli::run(std::env::args_os()));
}
