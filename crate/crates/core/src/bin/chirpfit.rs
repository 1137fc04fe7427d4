fn main() {
    std::process::exit(chirpfit::cli::run(std::env::args_os()));
}
