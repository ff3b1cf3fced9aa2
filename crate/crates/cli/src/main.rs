fn main() {
    std::process::exit(tmoz_cli::run(std::env::args_os()));
}
